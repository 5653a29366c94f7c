#include "lc/preferences.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lc {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double shifter_leisure(int j, int spouse, bool has_child, const EstimatedParams& est,
                       const ShifterSchedule& sched, const CalibratedParams& cal) {
  const double intercept = has_child ? (spouse == 1 ? est.phi_L1_child : est.phi_L2_child)
                                     : (spouse == 1 ? est.phi_L1_nochild : est.phi_L2_nochild);
  const double slope = has_child ? sched.leisure_slope_child : sched.leisure_slope_nochild;
  const int years = std::min(j, cal.j_retire) - cal.j_entry;
  return intercept + slope * years;
}

double shifter_parenting(int jc, int spouse, const EstimatedParams& est,
                         const ShifterSchedule& sched) {
  const double peak = spouse == 1 ? est.phi_T1 : est.phi_T2;
  const double flat = sched.parenting_flat_top_age;
  const double decline = std::max(sched.parenting_decline_age, flat + 1e-12);
  const double age = std::min(static_cast<double>(jc), decline);
  const double ramp = age <= flat ? 0.0 : (age - flat) / (decline - flat);
  return peak - sched.parenting_floor_offset * ramp;
}

Shifters shifters_at(int j, int jc, const EstimatedParams& est, const ShifterSchedule& sched,
                     const CalibratedParams& cal) {
  const bool has_child = jc >= 0;
  Shifters sh;
  sh.phi_C = has_child ? est.phi_C_child : kPhiCNoChild;
  sh.phi_L1 = shifter_leisure(j, 1, has_child, est, sched, cal);
  sh.phi_L2 = shifter_leisure(j, 2, has_child, est, sched, cal);
  sh.parenting = parenting_active(jc, cal);
  if (sh.parenting) {
    sh.phi_T1 = shifter_parenting(jc, 1, est, sched);
    sh.phi_T2 = shifter_parenting(jc, 2, est, sched);
  }
  return sh;
}

double consumption_utility(double c, double phi_C, double eta) {
  if (!(c > 0.0)) return kNegInf;
  const double p = 1.0 - 1.0 / eta;
  return std::exp(phi_C) * std::pow(c, p) / p;
}

double leisure_block(double L1, double L2, double phi_L1, double phi_L2,
                     const EstimatedParams& est) {
  if (!(L1 > 0.0) || !(L2 > 0.0)) return kNegInf;
  const double agg = std::exp(phi_L1) * std::pow(L1, 1.0 - 1.0 / est.psi_L1) +
                     std::exp(phi_L2) * std::pow(L2, 1.0 - 1.0 / est.psi_L2);
  return -std::pow(agg, 1.0 - est.rho_L) / (1.0 - est.rho_L);
}

double parenting_block(double T1, double T2_plus_N, double phi_T1, double phi_T2,
                       const EstimatedParams& est) {
  if (!(T1 > 0.0) || !(T2_plus_N > 0.0)) return kNegInf;
  const double agg = std::exp(phi_T1) * std::pow(T1, 1.0 - 1.0 / est.psi_T1) +
                     std::exp(phi_T2) * std::pow(T2_plus_N, 1.0 - 1.0 / est.psi_T2);
  return -std::pow(agg, 1.0 - est.rho_T) / (1.0 - est.rho_T);
}

double period_utility(double c, double L1, double L2, double T1, double T2, double N_eff,
                      const Shifters& sh, const EstimatedParams& est) {
  double u = consumption_utility(c, sh.phi_C, est.eta) +
             leisure_block(L1, L2, sh.phi_L1, sh.phi_L2, est);
  if (sh.parenting)
    u += parenting_block(T1, T2 + N_eff, sh.phi_T1, sh.phi_T2, est);
  return u;
}

}  // namespace lc
