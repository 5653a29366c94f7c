#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lc/params.hpp"
#include "lc/simulate.hpp"
#include "lc/tables.hpp"

namespace lc {

// ---------------------------------------------------------------------------
// moment conditions: wife work / leisure / childcare age profiles (hours/day)

enum class MomentKind { kWork = 0, kLeisure = 1, kChildcare = 2 };

struct MomentRow {
  int age = 0;
  MomentKind kind = MomentKind::kWork;
  double model = 0.0;
  double data = 0.0;
  double weight = 1.0;
  double residual() const { return model - data; }
};

struct GmmOptions {
  int age_lo = 20;
  int age_hi = 64;
  bool work_includes_housework = true;
  double weight_work = 1.0 / 8.0;
  double weight_leisure = 1.0 / 12.0;
  double weight_childcare = 1.0 / 4.0;

  // optimizer controls
  std::vector<std::string> free_names;  // empty = all parameters free
  int max_evals = 400;
  double tol = 1e-4;
  int restarts = 1;
  double init_step = 0.05;  // simplex edge, relative to box width
  double penalty = 1e10;
  std::string log_path;  // per-evaluation CSV trace, empty = off
};

std::vector<MomentRow> compute_moments(const AgeProfile& model, const TimeUseTable& data,
                                       const GmmOptions& opt);
double moment_objective(const std::vector<MomentRow>& rows);

// ---------------------------------------------------------------------------
// parameter vector packing (fixed order shared by optimizer, logs, configs)

const std::vector<std::string>& theta_names();
Eigen::VectorXd theta_pack(const EstimatedParams& p);
EstimatedParams theta_unpack(const Eigen::VectorXd& v);
void theta_bounds(Eigen::VectorXd& lo, Eigen::VectorXd& hi);

// ---------------------------------------------------------------------------
// derivative-free box-constrained minimizer (adaptive simplex)

struct SimplexOptions {
  int max_evals = 400;
  double tol = 1e-4;     // scaled simplex diameter
  int restarts = 1;      // extra re-initializations around the incumbent
  double init_step = 0.05;
  std::function<void(int, double, const Eigen::VectorXd&)> on_eval;  // optional trace
};

struct SimplexResult {
  Eigen::VectorXd x;
  double f = 0.0;
  int evals = 0;
  bool converged = false;
};

SimplexResult minimize_simplex(const std::function<double(const Eigen::VectorXd&)>& f,
                               const Eigen::VectorXd& x0, const Eigen::VectorXd& lo,
                               const Eigen::VectorXd& hi, const SimplexOptions& opt);

// ---------------------------------------------------------------------------
// full estimation loop over a model pipeline (params -> aggregate profile)

using ProfilePipeline = std::function<AgeProfile(const EstimatedParams&)>;

struct EstimateResult {
  EstimatedParams params;
  double objective = 0.0;
  int evals = 0;
  bool converged = false;
  std::vector<MomentRow> moments;  // at the optimum
  std::vector<std::string> notes;
};

double gmm_objective(const ProfilePipeline& pipeline, const TimeUseTable& data,
                     const GmmOptions& opt, const EstimatedParams& p);

EstimateResult estimate(const ProfilePipeline& pipeline, const TimeUseTable& data,
                        const GmmOptions& opt, const EstimatedParams& start);

}  // namespace lc
