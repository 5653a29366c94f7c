#pragma once

#include <iosfwd>
#include <vector>

#include "lc/budget.hpp"
#include "lc/params.hpp"
#include "lc/preferences.hpp"
#include "lc/shocks.hpp"

namespace lc {

// Exogenous age paths for one household type, indexed by j - j_entry.
struct AgeProfileInputs {
  Eigen::VectorXd kappa1, kappa2;  // productivity multipliers (used while working)
  Eigen::VectorXd survival;        // P(alive at j+1 | alive at j)
  double pension = 0.0;            // joint benefit per year from j_retire on
};

// Everything needed to solve one household type.
struct ModelInputs {
  EstimatedParams est;
  CalibratedParams cal;
  GridSpec gspec;
  ShifterSchedule sched;
  HouseholdType type;
  AgeProfileInputs ages;
  MarkovChain zchain;      // joint persistent pair
  DiscreteDistribution edist;  // joint transitory pair

  Grids grids() const { return Grids::build(gspec, cal); }
};

struct SolveOptions {
  bool allow_birth = true;
  int threads = 1;  // OpenMP workers for the within-age state loop
};

// One age of value/policy over the within-age state indexing of params.hpp.
struct AgeSlice {
  Eigen::ArrayXd value;
  std::vector<ChoicePoint> policy;
};

// Backward-induction output. value/policy are [k][j - j_entry]; with-child
// slices are empty below j_birth. States with no feasible choice carry value
// -inf and an invalid ChoicePoint.
struct Solution {
  GridSpec gspec;
  CalibratedParams cal;
  std::vector<AgeSlice> branch[2];

  // pre-birth-overlay childless values at j_birth (for the dominance diagnostic)
  Eigen::ArrayXd nobirth_value_at_jbirth;

  bool has_branch(int k, int j) const;
  const AgeSlice& at(int k, int j) const;
  double value_at(const StateIndex& s) const;
  const ChoicePoint& policy_at(const StateIndex& s) const;

  // share of birth-age states where having the child beats staying childless
  double birth_dominance_share() const;

  // deterministic CSV dump: j,k,ia,iz,ie,value,iL1,iL2,iT1,iT2,ia_next,birth,pl
  void dump_csv(std::ostream& os) const;
};

// warm-glow value of leaving a_next behind
double warm_glow(double a_next, const CalibratedParams& cal, const EstimatedParams& est);

// Solve one age. next_same_branch is the j+1 slice of the same child branch
// (null at j_max); birth_same_age is the with-child slice of the SAME age,
// passed only for the childless branch at j_birth when births are allowed.
AgeSlice bellman_step(int j, int k, const AgeSlice* next_same_branch,
                      const AgeSlice* birth_same_age, const ModelInputs& in,
                      const SolveOptions& opt);

Solution solve_lifecycle(const ModelInputs& in, const SolveOptions& opt);

}  // namespace lc
