#pragma once

#include <array>
#include <string>
#include <vector>

#include "lc/config.hpp"
#include "lc/estimate.hpp"
#include "lc/params.hpp"
#include "lc/shocks.hpp"
#include "lc/simulate.hpp"
#include "lc/solver.hpp"
#include "lc/tables.hpp"

namespace lc {

// Parsed command line of the `lifecycle` tool.
struct RunConfig {
  std::string command;           // solve | simulate | estimate | counterfactual |
                                 // validate | export-defaults
  std::string preset = "paper";  // paper (full grids) | desk (coarse, shorter horizon)
  std::string config_path;       // optional key=value settings file
  std::string data_dir;          // optional input tables; synthesized when absent
  std::string out_dir = "out";
  std::vector<std::string> sets;  // repeated --set key=value overrides
  std::string experiment;         // counterfactual name
  int threads = 1;
};

// Fully resolved settings plus shared inputs (tables, discretized shocks).
struct ModelBundle {
  EstimatedParams est;
  CalibratedParams cal;
  GridSpec gspec;
  ShockParams shocks;
  ShifterSchedule sched;
  std::array<HouseholdType, 4> types = default_types();

  ProductivityTable productivity;
  SurvivalTable survival;
  TimeUseTable timeuse;
  PenaltyTable penalty;
  MarkovChain zchain;
  DiscreteDistribution edist;

  bool allow_birth = true;
  bool survival_weighted = false;
  bool emit_penalty = true;
  std::string type_filter;  // empty = all four types
  std::string survival_mode = "geomean";
  GmmOptions gmm;
  int threads = 1;
  int penalty_horizon = 18;

  std::vector<std::string> notes;  // data substitutions, interpolation messages

  ModelInputs inputs_for(const HouseholdType& type) const;
  std::vector<HouseholdType> active_types() const;  // after type_filter
};

// Derives the bundle: preset, then config file, then --set overrides; loads or
// synthesizes tables; discretizes the shocks. Throws on unknown keys.
ModelBundle build_bundle(const RunConfig& rc, ConfigMap& cfg);
ModelBundle make_bundle(const RunConfig& rc);

// key = value lines for every recognized setting at its current value
std::vector<std::string> dump_config(const ModelBundle& b);

// solve + simulate helpers shared by the subcommands
SimResult solve_and_simulate(const ModelBundle& b, const HouseholdType& type, bool allow_birth,
                             Solution* sol_out = nullptr);
AgeProfile aggregate_overall(const ModelBundle& b, const std::vector<HouseholdType>& types);

// model-implied wife-earnings gap series for one type
PenaltySeries penalty_for(const ModelBundle& b, const HouseholdType& type);

// 0 = success, 1 = a validation check failed, 2 = usage/config/data error
int run(const RunConfig& rc);

}  // namespace lc
