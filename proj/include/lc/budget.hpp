#pragma once

#include "lc/params.hpp"

namespace lc {

// Money flows of one household-year. All earnings are net of tax; consumption
// closes the budget: c + fee + a_next = (1+r)a + earn1 + earn2 + pl + pension.
struct FlowBreakdown {
  double assets = 0.0;    // beginning-of-period a
  double interest = 0.0;  // r * a
  double earn1 = 0.0;     // husband net market earnings
  double earn2 = 0.0;     // wife net market earnings
  double pl_income = 0.0;
  double fee = 0.0;
  double pension = 0.0;
  double consumption = 0.0;
  double a_next = 0.0;
};

// Hours of one household-year resolved from a grid choice. Market hours are
// the residual 1 - L - T - hw; a value below -1e-12 marks the combination
// infeasible (tinier negatives are clamped to zero).
struct TimeAlloc {
  double L1 = 0.0, T1 = 0.0, m1 = 0.0;
  double L2 = 0.0, T2 = 0.0, m2 = 0.0;
};

double market_hours(double L, double T, double hw);

// zero from j_retire onward regardless of hours
double spouse_earnings(int j, double market, double z, double e, double kappa_j,
                       const CalibratedParams& cal);

// replacement-rate benefit off the reference workday, paid only inside the
// leave window; scales with the wife's current productivity
double pl_benefit(int jc, bool pl, double z2, double e2, double kappa_j2,
                  const CalibratedParams& cal);

// fee_rate share of the wife's net market earnings inside the nursery window
double nursery_fee(int jc, bool uses_nursery, double earn2, const CalibratedParams& cal);

// flat joint pension off reference hours at the retirement-age productivity
double pension_level(double kappa_jr_1, double kappa_jr_2, const CalibratedParams& cal);

// budget closure; callers treat c <= 0 as infeasible
double consumption_residual(const FlowBreakdown& f, double a, double a_next,
                            const CalibratedParams& cal);

// Single source of truth turning a ChoicePoint into hours. `parenting` gates
// the T indices (T=0 when inactive); pl=1 pins the wife's market hours to 0
// with leisure as the off-grid residual.
TimeAlloc resolve_times(const ChoicePoint& cp, bool parenting, const Grids& grids,
                        const CalibratedParams& cal);

bool times_feasible(const TimeAlloc& t, double time_floor);

// Full flow assembly used by the simulator and tests (the solver's inner loop
// carries the same arithmetic in flattened form).
FlowBreakdown compute_flows(int j, int jc, const TimeAlloc& t, double z1, double e1, double z2,
                            double e2, double kappa1_j, double kappa2_j, double pension,
                            bool pl, bool uses_nursery, double a, double a_next,
                            const CalibratedParams& cal);

}  // namespace lc
