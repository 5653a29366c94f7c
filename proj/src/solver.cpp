#include "lc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "lc/csv.hpp"

namespace lc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// one admissible (leisure, parenting, leave) combination with its time utility
struct Combo {
  double utime;
  double m1, m2;  // market hours (m2 = 0 under a standard leave year)
  int flat_base;  // canonical choice index with ia_next = 0
  std::int8_t iL1, iL2, iT1, iT2;
  std::uint8_t pl;
};

void check_inputs(const ModelInputs& in) {
  validate(in.gspec, in.cal);
  const auto& e = in.est;
  auto fail = [](const char* m) { throw std::invalid_argument(std::string("solver: ") + m); };
  for (double psi : {e.eta, e.psi_L1, e.psi_L2, e.psi_T1, e.psi_T2})
    if (!(psi > 0.0 && psi < 1.0)) fail("eta/psi parameters must lie in (0,1)");
  if (!(std::abs(e.rho_L) < 1.0 && std::abs(e.rho_T) < 1.0)) fail("|rho| must be < 1");
  const int n_ages = in.cal.n_ages();
  if (in.ages.kappa1.size() != n_ages || in.ages.kappa2.size() != n_ages ||
      in.ages.survival.size() != n_ages)
    fail("age inputs must cover j_entry..j_max");
  for (int t = 0; t < n_ages; ++t) {
    if (in.ages.survival(t) < 0.0 || in.ages.survival(t) > 1.0)
      fail("survival probabilities must lie in [0,1]");
    if (in.cal.j_entry + t < in.cal.j_retire && (in.ages.kappa1(t) < 0.0 || in.ages.kappa2(t) < 0.0))
      fail("productivity must be nonnegative over working ages");
  }
  if (in.zchain.size() != in.gspec.n_z * in.gspec.n_z)
    fail("persistent chain size must match n_z^2");
  if (in.edist.size() != in.gspec.n_e * in.gspec.n_e)
    fail("transitory distribution size must match n_e^2");
}

std::vector<Combo> build_combos(bool active, bool pl_ok, double N_eff, const Shifters& sh,
                                const ModelInputs& in, const Grids& g) {
  const auto& cal = in.cal;
  const auto& est = in.est;
  const int nL = in.gspec.n_leisure;
  const int nT = in.gspec.n_parenting;
  const int nA = in.gspec.n_assets;
  const int nT_eff = active ? nT : 1;

  // canonical flattened choice index (ties resolve toward the smallest)
  auto flat = [&](int pl, int iL1, int iT1, int iL2, int iT2) {
    return ((((pl * nL + iL1) * nT + iT1) * nL + iL2) * nT + iT2) * nA;
  };

  // time-utility tables
  Eigen::ArrayXXd uL(nL, nL);
  for (int i1 = 0; i1 < nL; ++i1)
    for (int i2 = 0; i2 < nL; ++i2)
      uL(i1, i2) = leisure_block(g.leisure1(i1), g.leisure2(i2), sh.phi_L1, sh.phi_L2, est);
  Eigen::ArrayXXd uT(nT_eff, nT_eff);
  if (active)
    for (int i1 = 0; i1 < nT; ++i1)
      for (int i2 = 0; i2 < nT; ++i2)
        uT(i1, i2) = parenting_block(g.parenting1(i1), g.parenting2(i2) + N_eff, sh.phi_T1,
                                     sh.phi_T2, est);

  std::vector<Combo> out;
  out.reserve(static_cast<size_t>(nL) * nT_eff * (nL * nT_eff + (pl_ok ? nT : 0)));

  for (int iL1 = 0; iL1 < nL; ++iL1)
    for (int iT1 = 0; iT1 < nT_eff; ++iT1) {
      const double T1 = active ? g.parenting1(iT1) : 0.0;
      const double m1 = market_hours(g.leisure1(iL1), T1, cal.hw_hours_1);
      if (m1 < -1e-12) continue;
      for (int iL2 = 0; iL2 < nL; ++iL2)
        for (int iT2 = 0; iT2 < nT_eff; ++iT2) {
          const double T2 = active ? g.parenting2(iT2) : 0.0;
          const double m2 = market_hours(g.leisure2(iL2), T2, cal.hw_hours_2);
          if (m2 < -1e-12) continue;
          Combo cm;
          cm.utime = uL(iL1, iL2) + (active ? uT(iT1, iT2) : 0.0);
          cm.m1 = std::max(m1, 0.0);
          cm.m2 = std::max(m2, 0.0);
          cm.flat_base = flat(0, iL1, iT1, iL2, iT2);
          cm.iL1 = static_cast<std::int8_t>(iL1);
          cm.iL2 = static_cast<std::int8_t>(iL2);
          cm.iT1 = static_cast<std::int8_t>(iT1);
          cm.iT2 = static_cast<std::int8_t>(iT2);
          cm.pl = 0;
          out.push_back(cm);
        }
      if (pl_ok && !cal.pl_literal) {
        // leave year: wife off the market, childcare on-grid, leisure residual
        for (int iT2 = 0; iT2 < nT; ++iT2) {
          const double T2 = g.parenting2(iT2);
          const double L2 = 1.0 - cal.hw_hours_2 - T2;
          if (L2 < in.gspec.time_floor - 1e-12) continue;
          Combo cm;
          cm.utime = leisure_block(g.leisure1(iL1), L2, sh.phi_L1, sh.phi_L2, est) +
                     parenting_block(g.parenting1(iT1), T2 + N_eff, sh.phi_T1, sh.phi_T2, est);
          cm.m1 = std::max(m1, 0.0);
          cm.m2 = 0.0;
          cm.flat_base = flat(1, iL1, iT1, 0, iT2);
          cm.iL1 = static_cast<std::int8_t>(iL1);
          cm.iL2 = 0;
          cm.iT1 = static_cast<std::int8_t>(iT1);
          cm.iT2 = static_cast<std::int8_t>(iT2);
          cm.pl = 1;
          out.push_back(cm);
        }
      } else if (pl_ok && cal.pl_literal) {
        // variant: benefit stacks on unrestricted hours
        for (int iL2 = 0; iL2 < nL; ++iL2)
          for (int iT2 = 0; iT2 < nT; ++iT2) {
            const double T2 = g.parenting2(iT2);
            const double m2 = market_hours(g.leisure2(iL2), T2, cal.hw_hours_2);
            if (m2 < -1e-12) continue;
            Combo cm;
            cm.utime = uL(iL1, iL2) + uT(iT1, iT2);
            cm.m1 = std::max(m1, 0.0);
            cm.m2 = std::max(m2, 0.0);
            cm.flat_base = flat(1, iL1, iT1, iL2, iT2);
            cm.iL1 = static_cast<std::int8_t>(iL1);
            cm.iL2 = static_cast<std::int8_t>(iL2);
            cm.iT1 = static_cast<std::int8_t>(iT1);
            cm.iT2 = static_cast<std::int8_t>(iT2);
            cm.pl = 1;
            out.push_back(cm);
          }
      }
    }

  std::sort(out.begin(), out.end(), [](const Combo& a, const Combo& b) {
    if (a.utime != b.utime) return a.utime > b.utime;
    return a.flat_base < b.flat_base;
  });
  return out;
}

}  // namespace

double warm_glow(double a_next, const CalibratedParams& cal, const EstimatedParams& est) {
  const double p = 1.0 - 1.0 / est.eta;
  return cal.wg_scale * std::pow(a_next + cal.wg_shift, p) / p;
}

AgeSlice bellman_step(int j, int k, const AgeSlice* next_same_branch,
                      const AgeSlice* birth_same_age, const ModelInputs& in,
                      const SolveOptions& opt) {
  check_inputs(in);
  const auto& cal = in.cal;
  const auto& gs = in.gspec;
  const Grids g = in.grids();

  const int na = gs.n_assets;
  const int nz2 = gs.n_z * gs.n_z;
  const int ne2 = gs.n_e * gs.n_e;
  const int n_states = states_per_age(gs);
  const int jrel = j - cal.j_entry;

  const int jc = child_age(j, k, cal);
  const bool active = parenting_active(jc, cal);
  const bool retired = j >= cal.j_retire;
  const bool pl_ok = k == kWithChild && pl_window(jc, cal) && active && !retired;
  const double N_eff = nursery_effective(in.type, jc, cal);
  const double fee_keep =
      (in.type.uses_nursery && nursery_window(jc, cal)) ? 1.0 - cal.fee_rate : 1.0;
  const Shifters sh = shifters_at(j, jc, in.est, in.sched, cal);

  const double s_j = in.ages.survival(jrel);
  const double pc = 1.0 - 1.0 / in.est.eta;
  const double coefC = std::exp(sh.phi_C) / pc;  // < 0
  const double net = cal.wage * (1.0 - cal.tax);
  const double kap1 = retired ? 0.0 : net * in.ages.kappa1(jrel);
  const double kap2 = retired ? 0.0 : net * in.ages.kappa2(jrel);

  // continuation + bequest by (iz, next asset node)
  std::vector<double> W(static_cast<size_t>(nz2) * na, 0.0);
  {
    std::vector<double> beq(na, 0.0);
    if (j > cal.j_retire + cal.bequest_from_offset)
      for (int ia = 0; ia < na; ++ia)
        beq[ia] = (1.0 - s_j) * cal.beta * warm_glow(g.assets(ia), cal, in.est);
    if (next_same_branch) {
      const auto& vn = next_same_branch->value;
      // integrate the transitory pair first, then the persistent transition
      Eigen::ArrayXXd EVe(nz2, na);
      for (int ia = 0; ia < na; ++ia)
        for (int izp = 0; izp < nz2; ++izp) {
          const int base = (ia * nz2 + izp) * ne2;
          double acc = 0.0;
          for (int iep = 0; iep < ne2; ++iep) {
            const double q = in.edist.probs(iep);
            if (q > 0.0) acc += q * vn(base + iep);
          }
          EVe(izp, ia) = acc;
        }
      const double sb = s_j * cal.beta;
      for (int iz = 0; iz < nz2; ++iz)
        for (int ia = 0; ia < na; ++ia) {
          double acc = 0.0;
          for (int izp = 0; izp < nz2; ++izp) {
            const double p = in.zchain.transition(iz, izp);
            if (p > 0.0) acc += p * EVe(izp, ia);
          }
          W[static_cast<size_t>(iz) * na + ia] = sb * acc + beq[ia];
        }
    } else {
      for (int iz = 0; iz < nz2; ++iz)
        for (int ia = 0; ia < na; ++ia) W[static_cast<size_t>(iz) * na + ia] = beq[ia];
    }
  }
  std::vector<double> Wmax(nz2, kNegInf);
  for (int iz = 0; iz < nz2; ++iz)
    for (int ia = 0; ia < na; ++ia)
      Wmax[iz] = std::max(Wmax[iz], W[static_cast<size_t>(iz) * na + ia]);

  const std::vector<Combo> combos = build_combos(active, pl_ok, N_eff, sh, in, g);

  AgeSlice out;
  out.value = Eigen::ArrayXd::Constant(n_states, kNegInf);
  out.policy.assign(n_states, ChoicePoint{});

  const int loop_n = retired ? na : n_states;
  const int nt = opt.threads > 0 ? opt.threads : 1;

#pragma omp parallel for schedule(static) num_threads(nt)
  for (int it = 0; it < loop_n; ++it) {
    const int idx = retired ? it * nz2 * ne2 : it;  // retired: only (iz=0, ie=0)
    const int ie = idx % ne2;
    const int iz = (idx / ne2) % nz2;
    const int ia = idx / (ne2 * nz2);

    const double z1 = in.zchain.nodes(iz, 0), z2 = in.zchain.nodes(iz, 1);
    const double e1 = in.edist.nodes(ie, 0), e2 = in.edist.nodes(ie, 1);
    const double k1t = retired ? 0.0 : kap1 * productivity_multiplier(z1, e1);
    const double k2t_raw = retired ? 0.0 : kap2 * productivity_multiplier(z2, e2);
    const double k2t = k2t_raw * fee_keep;
    const double ypl = pl_ok ? cal.rr_pl * k2t_raw * (cal.h_ref - cal.hw_hours_2) : 0.0;
    const double cash = (1.0 + cal.r) * g.assets(ia) + (retired ? in.ages.pension : 0.0);
    const double* Wrow = W.data() + static_cast<size_t>(iz) * na;
    const double wmax = Wmax[iz];

    double best = kNegInf;
    int best_flat = std::numeric_limits<int>::max();
    int best_ia = -1;
    const Combo* best_cm = nullptr;

    for (const Combo& cm : combos) {
      if (cm.utime + wmax <= best) break;  // sorted by utime: nothing later can win or tie
      const double cbase = cash + k1t * cm.m1 + k2t * cm.m2 + (cm.pl ? ypl : 0.0);
      for (int ian = 0; ian < na; ++ian) {
        const double c = cbase - g.assets(ian);
        if (c <= 0.0) break;
        const double v = coefC * std::pow(c, pc) + cm.utime + Wrow[ian];
        const int fl = cm.flat_base + ian;
        if (v > best || (v == best && fl < best_flat)) {
          best = v;
          best_flat = fl;
          best_ia = ian;
          best_cm = &cm;
        }
      }
    }

    out.value(idx) = best;
    if (best_cm) {
      ChoicePoint cp;
      cp.ia_next = static_cast<std::int16_t>(best_ia);
      cp.iL1 = best_cm->iL1;
      cp.iL2 = best_cm->iL2;
      cp.iT1 = best_cm->iT1;
      cp.iT2 = best_cm->iT2;
      cp.pl = best_cm->pl;
      out.policy[idx] = cp;
    }
  }

  if (retired) {  // shocks are payoff-irrelevant once labor income is gone
    for (int ia = 0; ia < na; ++ia) {
      const int src = ia * nz2 * ne2;
      for (int r = 1; r < nz2 * ne2; ++r) {
        out.value(src + r) = out.value(src);
        out.policy[src + r] = out.policy[src];
      }
    }
  }

  if (birth_same_age) {  // childless at j_birth: option to start a family now
    for (int idx = 0; idx < n_states; ++idx) {
      if (birth_same_age->value(idx) > out.value(idx)) {
        out.value(idx) = birth_same_age->value(idx);
        out.policy[idx] = birth_same_age->policy[idx];
        out.policy[idx].birth = 1;
      }
    }
  }
  return out;
}

Solution solve_lifecycle(const ModelInputs& in, const SolveOptions& opt) {
  check_inputs(in);
  const auto& cal = in.cal;
  const int n_ages = cal.n_ages();

  Solution sol;
  sol.gspec = in.gspec;
  sol.cal = cal;
  sol.branch[0].resize(n_ages);
  sol.branch[1].resize(n_ages);

  for (int j = cal.j_max; j >= cal.j_entry; --j) {
    const int jrel = j - cal.j_entry;
    const AgeSlice* next_cl = j < cal.j_max ? &sol.branch[0][jrel + 1] : nullptr;
    if (j >= cal.j_birth) {
      const AgeSlice* next_wc = j < cal.j_max ? &sol.branch[1][jrel + 1] : nullptr;
      sol.branch[1][jrel] = bellman_step(j, kWithChild, next_wc, nullptr, in, opt);
    }
    const bool birth_here = opt.allow_birth && j == cal.j_birth && j <= cal.j_max;
    AgeSlice cl = bellman_step(j, kChildless, next_cl, nullptr, in, opt);
    if (birth_here) {
      sol.nobirth_value_at_jbirth = cl.value;
      const AgeSlice& wc = sol.branch[1][jrel];
      for (int idx = 0; idx < cl.value.size(); ++idx) {
        if (wc.value(idx) > cl.value(idx)) {
          cl.value(idx) = wc.value(idx);
          cl.policy[idx] = wc.policy[idx];
          cl.policy[idx].birth = 1;
        }
      }
    }
    sol.branch[0][jrel] = std::move(cl);
  }
  return sol;
}

bool Solution::has_branch(int k, int j) const {
  if (j < cal.j_entry || j > cal.j_max) return false;
  return k == kChildless || j >= cal.j_birth;
}

const AgeSlice& Solution::at(int k, int j) const { return branch[k][j - cal.j_entry]; }

double Solution::value_at(const StateIndex& s) const {
  return at(s.k, s.j).value(flatten_within_age(s.ia, s.iz, s.ie, gspec));
}

const ChoicePoint& Solution::policy_at(const StateIndex& s) const {
  return at(s.k, s.j).policy[flatten_within_age(s.ia, s.iz, s.ie, gspec)];
}

double Solution::birth_dominance_share() const {
  if (nobirth_value_at_jbirth.size() == 0) return 0.0;
  const auto& wc = at(kWithChild, cal.j_birth).value;
  int better = 0;
  for (int i = 0; i < wc.size(); ++i)
    if (wc(i) > nobirth_value_at_jbirth(i)) ++better;
  return static_cast<double>(better) / static_cast<double>(wc.size());
}

void Solution::dump_csv(std::ostream& os) const {
  os << "j,k,ia,iz,ie,value,iL1,iL2,iT1,iT2,ia_next,birth,pl\n";
  const int nz2 = gspec.n_z * gspec.n_z;
  const int ne2 = gspec.n_e * gspec.n_e;
  for (int j = cal.j_entry; j <= cal.j_max; ++j)
    for (int k = 0; k < 2; ++k) {
      if (!has_branch(k, j)) continue;
      const AgeSlice& sl = at(k, j);
      for (int idx = 0; idx < sl.value.size(); ++idx) {
        const int ie = idx % ne2;
        const int iz = (idx / ne2) % nz2;
        const int ia = idx / (ne2 * nz2);
        const ChoicePoint& cp = sl.policy[idx];
        os << j << ',' << k << ',' << ia << ',' << iz << ',' << ie << ','
           << fmt_double(sl.value(idx)) << ',' << static_cast<int>(cp.iL1) << ','
           << static_cast<int>(cp.iL2) << ',' << static_cast<int>(cp.iT1) << ','
           << static_cast<int>(cp.iT2) << ',' << cp.ia_next << ','
           << static_cast<int>(cp.birth) << ',' << static_cast<int>(cp.pl) << '\n';
      }
    }
}

}  // namespace lc
