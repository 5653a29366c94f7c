#pragma once

#include "lc/params.hpp"

namespace lc {

// Deterministic age paths of the taste shifters (levels live in EstimatedParams).
struct ShifterSchedule {
  double leisure_slope_child = -0.12;   // per year of age, households with a child
  double leisure_slope_nochild = 0.06;  // per year of age, childless households
  double parenting_decline_age = 18.0;  // childcare taste hits its floor here
  double parenting_floor_offset = 2.0;  // peak-to-floor drop (log scale)
  double parenting_flat_top_age = 1.0;  // taste stays at peak through this child age
};

// Evaluated log-scale taste levels for one (age, child status, spouse pair)
struct Shifters {
  double phi_C = kPhiCNoChild;
  double phi_L1 = 0.0, phi_L2 = 0.0;
  bool parenting = false;  // whether the childcare block enters at all
  double phi_T1 = 0.0, phi_T2 = 0.0;
};

// intercept by (spouse, child status) plus an age ramp that freezes at retirement
double shifter_leisure(int j, int spouse, bool has_child, const EstimatedParams& est,
                       const ShifterSchedule& sched, const CalibratedParams& cal);

// peak at child age 0, linear decline to peak-offset at the decline age
// (optionally flat through parenting_flat_top_age first)
double shifter_parenting(int jc, int spouse, const EstimatedParams& est,
                         const ShifterSchedule& sched);

// bundle for one (j, jc) situation; jc = -1 means no child
Shifters shifters_at(int j, int jc, const EstimatedParams& est, const ShifterSchedule& sched,
                     const CalibratedParams& cal);

// utility pieces; each is -inf (never NaN) outside its domain
double consumption_utility(double c, double phi_C, double eta);
double leisure_block(double L1, double L2, double phi_L1, double phi_L2,
                     const EstimatedParams& est);
double parenting_block(double T1, double T2_plus_N, double phi_T1, double phi_T2,
                       const EstimatedParams& est);

// full period utility; the childcare block is skipped when sh.parenting is false
double period_utility(double c, double L1, double L2, double T1, double T2, double N_eff,
                      const Shifters& sh, const EstimatedParams& est);

}  // namespace lc
