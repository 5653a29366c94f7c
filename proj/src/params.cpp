#include "lc/params.hpp"

#include <cmath>
#include <stdexcept>

namespace lc {

std::string HouseholdType::name() const {
  std::string s = (edu == Education::college) ? "college" : "highschool";
  s += uses_nursery ? "_nursery" : "_home";
  return s;
}

std::array<HouseholdType, 4> default_types() {
  return {HouseholdType{Education::college, true, 0.25},
          HouseholdType{Education::college, false, 0.25},
          HouseholdType{Education::highschool, true, 0.25},
          HouseholdType{Education::highschool, false, 0.25}};
}

Grids Grids::build(const GridSpec& g, const CalibratedParams& cal) {
  validate(g, cal);
  auto linspaced = [](int n, double lo, double hi) {
    return n == 1 ? Eigen::ArrayXd::Constant(1, lo).eval()
                  : Eigen::ArrayXd::LinSpaced(n, lo, hi).eval();
  };
  Grids out;
  out.assets = linspaced(g.n_assets, 0.0, g.asset_max);
  out.leisure1 = linspaced(g.n_leisure, g.time_floor, 1.0 - cal.hw_hours_1);
  out.leisure2 = linspaced(g.n_leisure, g.time_floor, 1.0 - cal.hw_hours_2);
  out.parenting1 = linspaced(g.n_parenting, g.time_floor, 1.0 - cal.hw_hours_1 - g.time_floor);
  out.parenting2 = linspaced(g.n_parenting, g.time_floor, 1.0 - cal.hw_hours_2 - g.time_floor);
  return out;
}

int child_age(int j, int k, const CalibratedParams& cal) {
  if (k != kWithChild || j < cal.j_birth) return -1;
  return j - cal.j_birth;
}

bool parenting_active(int jc, const CalibratedParams& cal) {
  return jc >= 0 && jc <= cal.support_max_childage;
}

bool pl_window(int jc, const CalibratedParams& cal) {
  return jc >= 0 && jc < cal.pl_max_childage;
}

bool nursery_window(int jc, const CalibratedParams& cal) {
  return jc >= cal.nursery_min_childage && jc <= cal.nursery_max_childage;
}

double nursery_effective(const HouseholdType& type, int jc, const CalibratedParams& cal) {
  return (type.uses_nursery && nursery_window(jc, cal)) ? cal.nursery_time : 0.0;
}

std::int64_t flat_state_count(const GridSpec& g, const CalibratedParams& cal) {
  return static_cast<std::int64_t>(states_per_age(g)) * cal.n_ages();
}

std::int64_t flatten(const StateIndex& s, const GridSpec& g, const CalibratedParams& cal) {
  const int jrel = s.j - cal.j_entry;
  return static_cast<std::int64_t>(jrel) * states_per_age(g) +
         flatten_within_age(s.ia, s.iz, s.ie, g);
}

StateIndex unflatten(std::int64_t idx, int k, const GridSpec& g, const CalibratedParams& cal) {
  const int per_age = states_per_age(g);
  const int nz2 = g.n_z * g.n_z;
  const int ne2 = g.n_e * g.n_e;
  StateIndex s;
  s.k = k;
  s.j = cal.j_entry + static_cast<int>(idx / per_age);
  int rest = static_cast<int>(idx % per_age);
  s.ie = rest % ne2;
  rest /= ne2;
  s.iz = rest % nz2;
  s.ia = rest / nz2;
  return s;
}

void validate(const GridSpec& g, const CalibratedParams& cal) {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("params: " + msg); };
  if (g.n_assets < 1 || g.n_z < 1 || g.n_e < 1 || g.n_leisure < 1 || g.n_parenting < 1)
    fail("grid sizes must be >= 1");
  if (g.asset_max <= 0.0) fail("asset_max must be > 0");
  if (g.time_floor <= 0.0 || g.time_floor >= 0.5) fail("time_floor must be in (0, 0.5)");
  if (cal.j_entry >= cal.j_max) fail("need j_entry < j_max");
  if (cal.j_birth <= cal.j_entry) fail("need j_birth > j_entry");
  if (cal.j_retire <= cal.j_birth) fail("need j_retire > j_birth");
  if (cal.beta <= 0.0 || cal.beta >= 1.0) fail("beta must be in (0,1)");
  if (cal.r <= -1.0) fail("r must be > -1");
  if (cal.tax < 0.0 || cal.tax >= 1.0) fail("tax must be in [0,1)");
  if (cal.hw_hours_1 < 0.0 || cal.hw_hours_1 + g.time_floor >= 1.0 ||
      cal.hw_hours_2 < 0.0 || cal.hw_hours_2 + g.time_floor >= 1.0)
    fail("housework hours leave no room on the time grids");
  if (cal.rr_pl < 0.0 || cal.fee_rate < 0.0 || cal.fee_rate > 1.0)
    fail("rr_pl must be >= 0 and fee_rate in [0,1]");
  if (cal.h_ref <= std::max(cal.hw_hours_1, cal.hw_hours_2))
    fail("h_ref must exceed housework hours");
  if (cal.pl_max_childage < 0 || cal.nursery_min_childage > cal.nursery_max_childage)
    fail("bad child-age windows");
  if (cal.support_max_childage < 0) fail("support_max_childage must be >= 0");
}

void validate_types(const std::array<HouseholdType, 4>& types) {
  double total = 0.0;
  for (const auto& t : types) {
    if (t.weight < 0.0) throw std::invalid_argument("params: type weight < 0");
    total += t.weight;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("params: type weights must sum to 1");
}

}  // namespace lc
