#pragma once

#include <vector>

#include "lc/solver.hpp"

namespace lc {

// Cross-section averages by age. Hours are per day (x24); earnings and assets
// are in model units per year. Branch-conditional variants renormalize within
// the branch; entries with no mass are 0.
struct AgeProfile {
  Eigen::VectorXi age;
  Eigen::VectorXd prob_birth, prob_pl;
  Eigen::VectorXd market1, housework1, childcare1, leisure1;
  Eigen::VectorXd market2, housework2, childcare2, leisure2;
  Eigen::VectorXd earn1, earn2, earn_hh;
  Eigen::VectorXd assets;

  int n() const { return static_cast<int>(age.size()); }
  int row_of(int j) const;  // -1 when absent

  std::vector<std::string> csv_header() const;
  std::vector<std::vector<double>> csv_rows() const;
};

struct SimOptions {
  bool survival_weighted = false;  // scale averages by cohort survival
};

struct SimResult {
  AgeProfile overall, with_child, childless;
  double birth_rate = 0.0;       // mass choosing birth at j_birth
  double top_asset_mass = 0.0;   // max over ages of mass on the top asset node
  double max_time_residual = 0.0;
  double max_budget_residual = 0.0;
  double max_mass_residual = 0.0;
  std::vector<std::string> warnings;
};

// Deterministic push-forward of the age-20 distribution (assets 0, shocks at
// their stationary/unconditional laws) through the solved policies.
// Throws if mass reaches a state with no feasible choice.
SimResult simulate_distribution(const ModelInputs& in, const Solution& sol,
                                const SimOptions& opt = {});

// weights must sum to 1 and profiles must share the age axis
AgeProfile aggregate_types(const std::vector<AgeProfile>& profiles,
                           const std::vector<double>& weights);

struct PenaltySeries {
  Eigen::VectorXi event_time;
  Eigen::VectorXd gap;  // (earn2_child - earn2_childless) / earn2_childless

  int trough_time() const;   // smallest t attaining the minimum
  double trough_gap() const;
};

// wife-earnings gap by years since the birth age
PenaltySeries child_penalty(const AgeProfile& with_child, const AgeProfile& childless,
                            int horizon, int j_birth);

}  // namespace lc
