#pragma once

#include <array>
#include <cstdint>
#include <string>

#include <Eigen/Dense>

namespace lc {

// Preference parameters searched over by the moment matcher (14 free values).
// Defaults are the point estimates the rest of the defaults were tuned around.
struct EstimatedParams {
  double eta = 0.4693;  // intertemporal elasticity on consumption

  // within-period curvature, husband (=1) / wife (=2)
  double psi_L1 = 0.1986;
  double psi_L2 = 0.1518;
  double psi_T1 = 0.2067;
  double psi_T2 = 0.5440;

  double rho_L = 0.4745;   // >0: spouses' leisure complements
  double rho_T = -0.1878;  // <0: spouses' childcare substitutes

  // leisure taste intercepts at the youngest age, by child status
  double phi_L1_child = -8.7970;
  double phi_L2_child = -8.8182;
  double phi_L1_nochild = -6.4374;
  double phi_L2_nochild = -8.8798;

  // childcare taste at child age 0
  double phi_T1 = -20.9558;
  double phi_T2 = -3.4116;

  double phi_C_child = -0.9785;
};

// consumption taste without children is pinned, not estimated
inline constexpr double kPhiCNoChild = -1.0;

// Everything set outside the estimation. Time is in fractions of the day,
// money in units of full-time-equivalent gross pay (wage=1), one period = 1 year.
struct CalibratedParams {
  double beta = 0.96;
  double r = 0.05;

  int j_entry = 20;
  int j_retire = 65;  // first retired age: no labor income from here on
  int j_max = 100;
  int j_birth = 30;   // the only age at which the birth choice is offered

  double hw_hours_1 = 0.125;  // housework, husband (3h/24)
  double hw_hours_2 = 0.125;  // housework, wife
  double nursery_time = 0.167;  // outsourced care added to the wife's childcare argument

  double rr_pl = 0.5;        // leave benefit replacement rate
  double fee_rate = 0.25;    // nursery fee as a share of the wife's net earnings
  double pension_rate = 0.3; // joint pension as a share of reference net earnings at j_retire
  double wage = 1.0;
  double tax = 0.20;
  double h_ref = 1.0 / 3.0;  // reference workday (8h) for the benefit and pension bases

  double wg_scale = 1.0;  // warm-glow bequest weight
  double wg_shift = 0.1;  // keeps the bequest term finite at zero assets

  bool pl_literal = false;  // variant: benefit stacks on top of unrestricted earnings

  int pl_max_childage = 2;       // leave available while child_age < this
  int nursery_min_childage = 2;  // nursery window: min <= child_age <= max
  int nursery_max_childage = 6;
  int support_max_childage = 18; // parenting block active while child_age <= this
  int bequest_from_offset = 10;  // warm glow enters for j > j_retire + this

  int n_ages() const { return j_max - j_entry + 1; }
};

enum class Education : int { college = 0, highschool = 1 };

struct HouseholdType {
  Education edu = Education::college;
  bool uses_nursery = false;
  double weight = 0.25;

  std::string name() const;
};

// college/high-school x nursery/home, equal weights, spouses share education
std::array<HouseholdType, 4> default_types();

struct GridSpec {
  int n_assets = 51;
  int n_z = 3;  // persistent shock nodes per spouse
  int n_e = 3;  // transitory shock nodes per spouse
  int n_leisure = 11;
  int n_parenting = 11;
  double asset_max = 10.0;
  double time_floor = 0.02;  // smallest positive grid value on time grids
};

// child branch of the state
enum ChildState : int { kChildless = 0, kWithChild = 1 };

struct StateIndex {
  int j = 0;   // age
  int k = kChildless;
  int ia = 0;  // asset node
  int iz = 0;  // joint persistent node, 0..n_z^2-1
  int ie = 0;  // joint transitory node, 0..n_e^2-1
};

// One point of the decision space. Time indices address the per-spouse grids;
// for pl=1 the wife's leisure is the off-grid residual and iL2 is 0 by
// convention. When the parenting block is inactive iT1=iT2=0 and T=0.
struct ChoicePoint {
  std::int16_t ia_next = -1;
  std::int8_t iL1 = -1, iL2 = -1, iT1 = -1, iT2 = -1;
  std::uint8_t birth = 0, pl = 0;

  bool valid() const { return ia_next >= 0; }
};

// Concrete grids implied by a GridSpec. Time grids are per spouse: leisure on
// [floor, 1-hw_i], parenting on [floor, 1-hw_i-floor].
struct Grids {
  Eigen::ArrayXd assets;
  Eigen::ArrayXd leisure1, leisure2;
  Eigen::ArrayXd parenting1, parenting2;

  static Grids build(const GridSpec& g, const CalibratedParams& cal);
};

// ---- index and window arithmetic ----

// -1 when there is no child in the state (childless branch or j < j_birth)
int child_age(int j, int k, const CalibratedParams& cal);

bool parenting_active(int jc, const CalibratedParams& cal);  // 0 <= jc <= support window
bool pl_window(int jc, const CalibratedParams& cal);
bool nursery_window(int jc, const CalibratedParams& cal);

// nursery_time when this household outsources care this year, else 0
double nursery_effective(const HouseholdType& type, int jc, const CalibratedParams& cal);

// states per child branch across the whole horizon: n_assets * n_z^2 * n_e^2 * ages
std::int64_t flat_state_count(const GridSpec& g, const CalibratedParams& cal);

inline int states_per_age(const GridSpec& g) {
  return g.n_assets * g.n_z * g.n_z * g.n_e * g.n_e;
}

inline int flatten_within_age(int ia, int iz, int ie, const GridSpec& g) {
  const int ne2 = g.n_e * g.n_e;
  const int nz2 = g.n_z * g.n_z;
  return (ia * nz2 + iz) * ne2 + ie;
}

std::int64_t flatten(const StateIndex& s, const GridSpec& g, const CalibratedParams& cal);
StateIndex unflatten(std::int64_t idx, int k, const GridSpec& g, const CalibratedParams& cal);

// throws std::invalid_argument on inconsistent settings (grid sizes < 1,
// j ordering, weights not summing to 1, negative time floor, ...)
void validate(const GridSpec& g, const CalibratedParams& cal);
void validate_types(const std::array<HouseholdType, 4>& types);

}  // namespace lc
