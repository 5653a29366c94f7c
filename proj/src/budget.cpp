#include "lc/budget.hpp"

#include <cmath>

namespace lc {

namespace {
constexpr double kHoursTol = 1e-12;

double clamp_tiny(double m) { return (m < 0.0 && m >= -kHoursTol) ? 0.0 : m; }
}  // namespace

double market_hours(double L, double T, double hw) { return 1.0 - L - T - hw; }

double spouse_earnings(int j, double market, double z, double e, double kappa_j,
                       const CalibratedParams& cal) {
  if (j >= cal.j_retire) return 0.0;
  return cal.wage * (1.0 - cal.tax) * kappa_j * std::exp(z + e) * market;
}

double pl_benefit(int jc, bool pl, double z2, double e2, double kappa_j2,
                  const CalibratedParams& cal) {
  if (!pl || !pl_window(jc, cal)) return 0.0;
  return cal.rr_pl * cal.wage * (1.0 - cal.tax) * kappa_j2 * std::exp(z2 + e2) *
         (cal.h_ref - cal.hw_hours_2);
}

double nursery_fee(int jc, bool uses_nursery, double earn2, const CalibratedParams& cal) {
  if (!uses_nursery || !nursery_window(jc, cal)) return 0.0;
  return cal.fee_rate * earn2;
}

double pension_level(double kappa_jr_1, double kappa_jr_2, const CalibratedParams& cal) {
  return cal.pension_rate * cal.wage * (1.0 - cal.tax) *
         (kappa_jr_1 * (cal.h_ref - cal.hw_hours_1) + kappa_jr_2 * (cal.h_ref - cal.hw_hours_2));
}

double consumption_residual(const FlowBreakdown& f, double a, double a_next,
                            const CalibratedParams& cal) {
  return (1.0 + cal.r) * a + f.earn1 + f.earn2 + f.pl_income + f.pension - f.fee - a_next;
}

TimeAlloc resolve_times(const ChoicePoint& cp, bool parenting, const Grids& grids,
                        const CalibratedParams& cal) {
  TimeAlloc t;
  t.L1 = grids.leisure1(cp.iL1);
  t.T1 = parenting ? grids.parenting1(cp.iT1) : 0.0;
  t.m1 = clamp_tiny(market_hours(t.L1, t.T1, cal.hw_hours_1));
  if (cp.pl && !cal.pl_literal) {
    t.T2 = grids.parenting2(cp.iT2);
    t.L2 = 1.0 - cal.hw_hours_2 - t.T2;
    t.m2 = 0.0;
  } else {
    t.L2 = grids.leisure2(cp.iL2);
    t.T2 = parenting ? grids.parenting2(cp.iT2) : 0.0;
    t.m2 = clamp_tiny(market_hours(t.L2, t.T2, cal.hw_hours_2));
  }
  return t;
}

bool times_feasible(const TimeAlloc& t, double time_floor) {
  return t.m1 >= 0.0 && t.m2 >= 0.0 && t.L1 >= time_floor - kHoursTol &&
         t.L2 >= time_floor - kHoursTol;
}

FlowBreakdown compute_flows(int j, int jc, const TimeAlloc& t, double z1, double e1, double z2,
                            double e2, double kappa1_j, double kappa2_j, double pension,
                            bool pl, bool uses_nursery, double a, double a_next,
                            const CalibratedParams& cal) {
  FlowBreakdown f;
  f.assets = a;
  f.interest = cal.r * a;
  f.a_next = a_next;
  if (j >= cal.j_retire) {
    f.pension = pension;
  } else {
    f.earn1 = spouse_earnings(j, t.m1, z1, e1, kappa1_j, cal);
    f.earn2 = (pl && !cal.pl_literal) ? 0.0 : spouse_earnings(j, t.m2, z2, e2, kappa2_j, cal);
    f.pl_income = pl_benefit(jc, pl, z2, e2, kappa2_j, cal);
    f.fee = nursery_fee(jc, uses_nursery, f.earn2, cal);
  }
  f.consumption = consumption_residual(f, a, a_next, cal);
  return f;
}

}  // namespace lc
