#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "approx.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "helpers.hpp"
#include "lc/runner.hpp"
#include "lc/solver.hpp"

using namespace lc;
using namespace lct;

namespace {

std::string dump_of(const Solution& sol) {
  std::ostringstream os;
  sol.dump_csv(os);
  return os.str();
}

// value/policy agreement between the production solver and the enumerator
void check_against_brute(const ModelInputs& in, bool allow_birth, double tol) {
  SolveOptions opt;
  opt.allow_birth = allow_birth;
  const Solution sol = solve_lifecycle(in, opt);
  const BruteSolution bs = brute_solve(in, allow_birth);
  const int n_states = states_per_age(in.gspec);
  double worst = 0.0;
  int bad_policy = 0;
  for (int j = in.cal.j_entry; j <= in.cal.j_max; ++j) {
    const int jr = j - in.cal.j_entry;
    for (int k = 0; k < 2; ++k) {
      if (k == kWithChild && j < in.cal.j_birth) continue;
      const AgeSlice& s = sol.at(k, j);
      for (int idx = 0; idx < n_states; ++idx) {
        worst = std::max(worst, value_gap(s.value(idx), bs.value[k][jr](idx)));
        if (!same_choice(s.policy[idx], bs.policy[k][jr][idx])) ++bad_policy;
      }
    }
  }
  CHECK(worst <= tol);
  CHECK(bad_policy == 0);
}

}  // namespace

TEST_CASE("warm glow: CRRA over shifted bequest") {
  CalibratedParams cal;   // wg_scale 1, wg_shift 0.1
  EstimatedParams est;    // eta 0.4693
  const double p = 1.0 - 1.0 / est.eta;
  CHECK(warm_glow(0.0, cal, est) ==
        lct::near(std::pow(cal.wg_shift, p) / p, 1e-12));
  CHECK(warm_glow(0.0, cal, est) == lct::near(-11.952, 2e-2));
  CHECK(warm_glow(1.0, cal, est) > warm_glow(0.5, cal, est));
  CHECK(warm_glow(0.5, cal, est) > warm_glow(0.0, cal, est));

  CalibratedParams flat = cal;
  flat.wg_scale = 0.0;
  CHECK(warm_glow(2.0, flat, est) == 0.0);
}

TEST_CASE("terminal age reduces to a static maximization") {
  const ModelInputs in = toy_inputs(20, 21);
  SolveOptions opt;
  const AgeSlice last = bellman_step(in.cal.j_max, kChildless, nullptr, nullptr, in, opt);
  for (int ia = 0; ia < in.gspec.n_assets; ++ia) {
    const BruteChoice bc = brute_best(in.cal.j_max, kChildless, ia, 0, 0, nullptr, in);
    CHECK(value_gap(last.value(ia), bc.value) <= 1e-12);
    CHECK(same_choice(last.policy[ia], bc.cp));
  }
}

TEST_CASE("two-period childless model matches exhaustive enumeration") {
  check_against_brute(toy_inputs(20, 21), true, 1e-12);
}

TEST_CASE("two-period values equal the best full path by direct enumeration") {
  const ModelInputs in = toy_inputs(20, 21);
  SolveOptions opt;
  const Solution sol = solve_lifecycle(in, opt);
  const Grids g = in.grids();
  const double sb = in.ages.survival(0) * in.cal.beta;

  for (int ia0 = 0; ia0 < in.gspec.n_assets; ++ia0) {
    double best = -kInf;
    const FlowScalars f0 = flow_scalars(20, kChildless, ia0, 0, 0, in);
    for_each_combo(20, kChildless, in, [&](const ComboItem& c0) {
      const double base0 = f0.cash + f0.k1t * c0.m1 + f0.k2t * c0.m2;
      for (int ia1 = 0; ia1 < in.gspec.n_assets; ++ia1) {
        const double cons0 = base0 - g.assets(ia1);
        if (cons0 <= 0.0) continue;
        const double u0 = f0.coefC * std::pow(cons0, f0.pc) + c0.utime;
        const FlowScalars f1 = flow_scalars(21, kChildless, ia1, 0, 0, in);
        for_each_combo(21, kChildless, in, [&](const ComboItem& c1) {
          const double base1 = f1.cash + f1.k1t * c1.m1 + f1.k2t * c1.m2;
          for (int ia2 = 0; ia2 < in.gspec.n_assets; ++ia2) {
            const double cons1 = base1 - g.assets(ia2);
            if (cons1 <= 0.0) continue;
            const double u1 = f1.coefC * std::pow(cons1, f1.pc) + c1.utime;
            best = std::max(best, u0 + sb * u1);
          }
        });
      }
    });
    StateIndex s;
    s.j = 20;
    s.ia = ia0;
    CHECK(value_gap(sol.value_at(s), best) <= 1e-12);
  }
}

TEST_CASE("birth, leave and nursery ages match exhaustive enumeration") {
  ModelInputs in = toy_inputs(29, 34);  // child ages 0..4 after a birth at 30
  in.cal.j_birth = 30;
  SUBCASE("home care") { check_against_brute(in, true, 1e-12); }
  SUBCASE("nursery user") {
    in.type.uses_nursery = true;
    check_against_brute(in, true, 1e-12);
  }
  SUBCASE("births disabled") { check_against_brute(in, false, 1e-12); }
  SUBCASE("literal leave accounting") {
    in.cal.pl_literal = true;
    check_against_brute(in, true, 1e-12);
  }
}

TEST_CASE("birth overlay keeps the pre-overlay childless values on the side") {
  ModelInputs in = toy_inputs(29, 34);
  in.cal.j_birth = 30;
  SolveOptions opt;
  const Solution sol = solve_lifecycle(in, opt);
  const BruteSolution no_birth = brute_solve(in, false);
  const int jr = in.cal.j_birth - in.cal.j_entry;
  const int n_states = states_per_age(in.gspec);
  REQUIRE(sol.nobirth_value_at_jbirth.size() == n_states);
  for (int idx = 0; idx < n_states; ++idx) {
    CHECK(value_gap(sol.nobirth_value_at_jbirth(idx), no_birth.value[0][jr](idx)) <= 1e-12);
    // the overlay can only improve the childless slice
    CHECK(sol.at(kChildless, in.cal.j_birth).value(idx) >=
          sol.nobirth_value_at_jbirth(idx));
  }
  CHECK(sol.has_branch(kWithChild, in.cal.j_birth));
  CHECK_FALSE(sol.has_branch(kWithChild, in.cal.j_birth - 1));
  const double share = sol.birth_dominance_share();
  CHECK(share >= 0.0);
  CHECK(share <= 1.0);
}

TEST_CASE("bequests enter only past the activation age") {
  ModelInputs in = toy_inputs(74, 78);
  in.cal.j_birth = 75;
  in.cal.j_retire = 76;

  SUBCASE("outside the window the glow scale is irrelevant") {
    in.cal.bequest_from_offset = 10;  // 76 + 10 > 78: never active
    ModelInputs strong = in;
    strong.cal.wg_scale = 50.0;
    ModelInputs none = in;
    none.cal.wg_scale = 0.0;
    SolveOptions opt;
    CHECK(dump_of(solve_lifecycle(strong, opt)) == dump_of(solve_lifecycle(none, opt)));
  }

  SUBCASE("inside the window the glow changes values and raises saving") {
    in.cal.bequest_from_offset = 0;  // active for j > 76
    ModelInputs strong = in;
    strong.cal.wg_scale = 50.0;
    ModelInputs none = in;
    none.cal.wg_scale = 0.0;
    SolveOptions opt;
    const Solution s_strong = solve_lifecycle(strong, opt);
    const Solution s_none = solve_lifecycle(none, opt);
    CHECK(dump_of(s_strong) != dump_of(s_none));
    // without a glow the final period consumes everything it can
    const int n_states = states_per_age(in.gspec);
    for (int k = 0; k < 2; ++k)
      for (int idx = 0; idx < n_states; ++idx) {
        const ChoicePoint& lean = s_none.at(k, 78).policy[idx];
        const ChoicePoint& keen = s_strong.at(k, 78).policy[idx];
        REQUIRE(lean.valid());
        CHECK(lean.ia_next == 0);
        CHECK(keen.ia_next >= lean.ia_next);
      }
  }
}

TEST_CASE("retirement wipes out shock dependence") {
  const ModelInputs in = span_inputs();
  SolveOptions opt;
  const Solution sol = solve_lifecycle(in, opt);
  const int nz2 = in.gspec.n_z * in.gspec.n_z;
  const int ne2 = in.gspec.n_e * in.gspec.n_e;

  for (int j = in.cal.j_retire; j <= in.cal.j_max; ++j)
    for (int k = 0; k < 2; ++k) {
      const AgeSlice& s = sol.at(k, j);
      for (int ia = 0; ia < in.gspec.n_assets; ++ia) {
        const int ref = flatten_within_age(ia, 0, 0, in.gspec);
        for (int iz = 0; iz < nz2; ++iz)
          for (int ie = 0; ie < ne2; ++ie) {
            const int idx = flatten_within_age(ia, iz, ie, in.gspec);
            CHECK(s.value(idx) == s.value(ref));  // broadcast: bit-identical
            CHECK(same_choice(s.policy[idx], s.policy[ref]));
          }
      }
    }

  // one year before retirement the shocks still matter somewhere
  const AgeSlice& pre = sol.at(kChildless, in.cal.j_retire - 1);
  double spread = 0.0;
  for (int ia = 0; ia < in.gspec.n_assets; ++ia) {
    double lo = kInf, hi = -kInf;
    for (int iz = 0; iz < nz2; ++iz)
      for (int ie = 0; ie < ne2; ++ie) {
        const double v = pre.value(flatten_within_age(ia, iz, ie, in.gspec));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    spread = std::max(spread, hi - lo);
  }
  CHECK(spread > 0.0);
}

TEST_CASE("value is weakly increasing in assets everywhere") {
  const ModelInputs in = span_inputs();
  SolveOptions opt;
  const Solution sol = solve_lifecycle(in, opt);
  const int nz2 = in.gspec.n_z * in.gspec.n_z;
  const int ne2 = in.gspec.n_e * in.gspec.n_e;
  int violations = 0;
  for (int j = in.cal.j_entry; j <= in.cal.j_max; ++j)
    for (int k = 0; k < 2; ++k) {
      if (!sol.has_branch(k, j)) continue;
      const AgeSlice& s = sol.at(k, j);
      for (int ia = 0; ia + 1 < in.gspec.n_assets; ++ia)
        for (int iz = 0; iz < nz2; ++iz)
          for (int ie = 0; ie < ne2; ++ie)
            if (!(s.value(flatten_within_age(ia + 1, iz, ie, in.gspec)) >=
                  s.value(flatten_within_age(ia, iz, ie, in.gspec))))
              ++violations;
    }
  CHECK(violations == 0);
}

TEST_CASE("shock-span model matches exhaustive enumeration") {
  check_against_brute(span_inputs(), true, 1e-12);
}

TEST_CASE("thread count never changes the answer") {
  const ModelInputs in = span_inputs();
  SolveOptions one;
  one.threads = 1;
  SolveOptions four;
  four.threads = 4;
  CHECK(dump_of(solve_lifecycle(in, one)) == dump_of(solve_lifecycle(in, four)));
}

TEST_CASE("coarse-preset household: births mostly dominate; wealth buys wife time off") {
  RunConfig rc;
  rc.command = "solve";
  rc.preset = "desk";
  const ModelBundle b = make_bundle(rc);
  const ModelInputs in = b.inputs_for(b.types[1]);  // college, home care
  SolveOptions opt;
  opt.threads = b.threads;
  const Solution sol = solve_lifecycle(in, opt);

  CHECK(sol.birth_dominance_share() >= 0.5);

  // at 35 with a child, the wife of a richer household works the market less
  const Grids g = in.grids();
  const int na = in.gspec.n_assets;
  const int mid_z = (in.gspec.n_z * in.gspec.n_z) / 2;
  const int mid_e = (in.gspec.n_e * in.gspec.n_e) / 2;
  const int jc = lc::child_age(35, kWithChild, in.cal);
  auto mean_m2 = [&](int lo, int hi) {
    double acc = 0.0;
    int n = 0;
    for (int ia = lo; ia < hi; ++ia) {
      const ChoicePoint& cp =
          sol.at(kWithChild, 35).policy[flatten_within_age(ia, mid_z, mid_e, in.gspec)];
      REQUIRE(cp.valid());
      const TimeAlloc t = resolve_times(cp, parenting_active(jc, in.cal), g, in.cal);
      acc += cp.pl ? 0.0 : t.m2;
      ++n;
    }
    return acc / n;
  };
  const int q = na / 4;
  CHECK(mean_m2(0, q) >= mean_m2(na - q, na));
}
