#pragma once

// Shared test fixtures: tiny deterministic models plus a no-shortcuts
// enumeration solver used as the oracle for the production backward induction.
// The enumerator replicates the flow arithmetic term by term (so exact ties
// resolve identically) but skips every production optimization: no combo
// sorting, no dominance pruning, no retirement broadcast.

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "lc/budget.hpp"
#include "lc/params.hpp"
#include "lc/preferences.hpp"
#include "lc/shocks.hpp"
#include "lc/solver.hpp"

namespace lct {

constexpr double kInf = std::numeric_limits<double>::infinity();

inline lc::MarkovChain unit_chain() {
  lc::MarkovChain mc;
  mc.n1 = mc.n2 = 1;
  mc.nodes = Eigen::MatrixXd::Zero(1, 2);
  mc.transition = Eigen::MatrixXd::Ones(1, 1);
  mc.stationary = Eigen::VectorXd::Ones(1);
  return mc;
}

inline lc::DiscreteDistribution unit_dist() {
  lc::DiscreteDistribution d;
  d.nodes = Eigen::MatrixXd::Zero(1, 2);
  d.probs = Eigen::VectorXd::Ones(1);
  return d;
}

// Deterministic toy over [j_entry, j_max]: 5 asset nodes, 3-point time grids,
// a single shock node. Irregular levels keep utilities away from exact ties.
inline lc::ModelInputs toy_inputs(int j_entry, int j_max, bool nursery = false) {
  lc::ModelInputs in;
  in.cal.j_entry = j_entry;
  in.cal.j_max = j_max;
  in.gspec.n_assets = 5;
  in.gspec.n_z = 1;
  in.gspec.n_e = 1;
  in.gspec.n_leisure = 3;
  in.gspec.n_parenting = 3;
  in.gspec.asset_max = 1.37;
  in.type.edu = lc::Education::college;
  in.type.uses_nursery = nursery;
  in.type.weight = 1.0;
  const int n = in.cal.n_ages();
  in.ages.kappa1 = Eigen::VectorXd::Constant(n, 1.07);
  in.ages.kappa2 = Eigen::VectorXd::Constant(n, 0.83);
  in.ages.survival = Eigen::VectorXd::Constant(n, 0.93);
  in.ages.pension = 0.11;
  in.zchain = unit_chain();
  in.edist = unit_dist();
  return in;
}

// Mid-sized model with real shocks spanning the retirement age.
inline lc::ModelInputs span_inputs(int n_z = 2, int n_e = 2) {
  lc::ModelInputs in;
  in.cal.j_entry = 58;
  in.cal.j_birth = 59;
  in.cal.j_retire = 65;
  in.cal.j_max = 72;
  in.gspec.n_assets = 7;
  in.gspec.n_z = n_z;
  in.gspec.n_e = n_e;
  in.gspec.n_leisure = 3;
  in.gspec.n_parenting = 3;
  in.gspec.asset_max = 2.0;
  in.type.weight = 1.0;
  const int n = in.cal.n_ages();
  in.ages.kappa1 = Eigen::VectorXd::Constant(n, 1.0);
  in.ages.kappa2 = Eigen::VectorXd::Constant(n, 0.8);
  in.ages.survival = Eigen::VectorXd::Constant(n, 0.95);
  lc::ShockParams sp;
  in.zchain = lc::discretize_var(sp, n_z);
  in.edist = lc::discretize_iid(sp.sigma_e, n_e);
  in.ages.pension = lc::pension_level(1.0, 0.8, in.cal);
  return in;
}

// one admissible hours combination at a given (age, child branch) situation
struct ComboItem {
  double utime = 0.0;
  double m1 = 0.0, m2 = 0.0;
  int pl = 0;
  int iL1 = 0, iT1 = 0, iL2 = 0, iT2 = 0;
};

// Enumerates every admissible (leave, leisure, childcare) combination in plain
// nested order, mirroring the production feasibility rules and utility calls.
template <class F>
inline void for_each_combo(int j, int k, const lc::ModelInputs& in, F&& fn) {
  const auto& cal = in.cal;
  const lc::Grids g = in.grids();
  const int nL = in.gspec.n_leisure;
  const int nT = in.gspec.n_parenting;
  const int jc = lc::child_age(j, k, cal);
  const bool active = lc::parenting_active(jc, cal);
  const bool retired = j >= cal.j_retire;
  const bool pl_ok = k == lc::kWithChild && lc::pl_window(jc, cal) && active && !retired;
  const double N_eff = lc::nursery_effective(in.type, jc, cal);
  const lc::Shifters sh = lc::shifters_at(j, jc, in.est, in.sched, cal);
  const int nT_eff = active ? nT : 1;

  for (int iL1 = 0; iL1 < nL; ++iL1)
    for (int iT1 = 0; iT1 < nT_eff; ++iT1) {
      const double T1 = active ? g.parenting1(iT1) : 0.0;
      const double m1 = lc::market_hours(g.leisure1(iL1), T1, cal.hw_hours_1);
      if (m1 < -1e-12) continue;
      for (int iL2 = 0; iL2 < nL; ++iL2)
        for (int iT2 = 0; iT2 < nT_eff; ++iT2) {
          const double T2 = active ? g.parenting2(iT2) : 0.0;
          const double m2 = lc::market_hours(g.leisure2(iL2), T2, cal.hw_hours_2);
          if (m2 < -1e-12) continue;
          ComboItem c;
          c.utime = lc::leisure_block(g.leisure1(iL1), g.leisure2(iL2), sh.phi_L1, sh.phi_L2,
                                      in.est) +
                    (active ? lc::parenting_block(g.parenting1(iT1), g.parenting2(iT2) + N_eff,
                                                  sh.phi_T1, sh.phi_T2, in.est)
                            : 0.0);
          c.m1 = std::max(m1, 0.0);
          c.m2 = std::max(m2, 0.0);
          c.iL1 = iL1;
          c.iT1 = iT1;
          c.iL2 = iL2;
          c.iT2 = iT2;
          fn(c);
        }
      if (pl_ok && !cal.pl_literal) {
        for (int iT2 = 0; iT2 < nT; ++iT2) {
          const double T2 = g.parenting2(iT2);
          const double L2 = 1.0 - cal.hw_hours_2 - T2;
          if (L2 < in.gspec.time_floor - 1e-12) continue;
          ComboItem c;
          c.utime = lc::leisure_block(g.leisure1(iL1), L2, sh.phi_L1, sh.phi_L2, in.est) +
                    lc::parenting_block(g.parenting1(iT1), T2 + N_eff, sh.phi_T1, sh.phi_T2,
                                        in.est);
          c.m1 = std::max(m1, 0.0);
          c.m2 = 0.0;
          c.pl = 1;
          c.iL1 = iL1;
          c.iT1 = iT1;
          c.iL2 = 0;
          c.iT2 = iT2;
          fn(c);
        }
      } else if (pl_ok && cal.pl_literal) {
        for (int iL2 = 0; iL2 < nL; ++iL2)
          for (int iT2 = 0; iT2 < nT; ++iT2) {
            const double T2 = g.parenting2(iT2);
            const double m2 = lc::market_hours(g.leisure2(iL2), T2, cal.hw_hours_2);
            if (m2 < -1e-12) continue;
            ComboItem c;
            c.utime = lc::leisure_block(g.leisure1(iL1), g.leisure2(iL2), sh.phi_L1, sh.phi_L2,
                                        in.est) +
                      lc::parenting_block(g.parenting1(iT1), g.parenting2(iT2) + N_eff,
                                          sh.phi_T1, sh.phi_T2, in.est);
            c.m1 = std::max(m1, 0.0);
            c.m2 = std::max(m2, 0.0);
            c.pl = 1;
            c.iL1 = iL1;
            c.iT1 = iT1;
            c.iL2 = iL2;
            c.iT2 = iT2;
            fn(c);
          }
      }
    }
}

// money scalars of one state, mirroring the production flow assembly
struct FlowScalars {
  double k1t = 0.0, k2t = 0.0, k2t_raw = 0.0, ypl = 0.0, cash = 0.0;
  double coefC = 0.0, pc = 0.0;
};

inline FlowScalars flow_scalars(int j, int k, int ia, int iz, int ie,
                                const lc::ModelInputs& in) {
  const auto& cal = in.cal;
  const lc::Grids g = in.grids();
  const int jrel = j - cal.j_entry;
  const int jc = lc::child_age(j, k, cal);
  const bool active = lc::parenting_active(jc, cal);
  const bool retired = j >= cal.j_retire;
  const bool pl_ok = k == lc::kWithChild && lc::pl_window(jc, cal) && active && !retired;
  const double fee_keep =
      (in.type.uses_nursery && lc::nursery_window(jc, cal)) ? 1.0 - cal.fee_rate : 1.0;
  const lc::Shifters sh = lc::shifters_at(j, jc, in.est, in.sched, cal);
  const double net = cal.wage * (1.0 - cal.tax);

  FlowScalars fs;
  fs.pc = 1.0 - 1.0 / in.est.eta;
  fs.coefC = std::exp(sh.phi_C) / fs.pc;
  const double z1 = in.zchain.nodes(iz, 0), z2 = in.zchain.nodes(iz, 1);
  const double e1 = in.edist.nodes(ie, 0), e2 = in.edist.nodes(ie, 1);
  const double kap1 = retired ? 0.0 : net * in.ages.kappa1(jrel);
  const double kap2 = retired ? 0.0 : net * in.ages.kappa2(jrel);
  fs.k1t = retired ? 0.0 : kap1 * lc::productivity_multiplier(z1, e1);
  fs.k2t_raw = retired ? 0.0 : kap2 * lc::productivity_multiplier(z2, e2);
  fs.k2t = fs.k2t_raw * fee_keep;
  fs.ypl = pl_ok ? cal.rr_pl * fs.k2t_raw * (cal.h_ref - cal.hw_hours_2) : 0.0;
  fs.cash = (1.0 + cal.r) * g.assets(ia) + (retired ? in.ages.pension : 0.0);
  return fs;
}

struct BruteChoice {
  double value = -kInf;
  int flat = std::numeric_limits<int>::max();
  lc::ChoicePoint cp;
};

// Best choice at one state by direct enumeration against a continuation table
// over the same within-age indexing (null at the last age).
inline BruteChoice brute_best(int j, int k, int ia, int iz, int ie,
                              const Eigen::ArrayXd* next, const lc::ModelInputs& in) {
  const auto& cal = in.cal;
  const auto& gs = in.gspec;
  const lc::Grids g = in.grids();
  const int na = gs.n_assets;
  const int nL = gs.n_leisure;
  const int nT = gs.n_parenting;
  const int nz2 = gs.n_z * gs.n_z;
  const int ne2 = gs.n_e * gs.n_e;
  const int jrel = j - cal.j_entry;
  const double s_j = in.ages.survival(jrel);
  const double sb = s_j * cal.beta;
  const FlowScalars fs = flow_scalars(j, k, ia, iz, ie, in);

  std::vector<double> W(na, 0.0);
  for (int ian = 0; ian < na; ++ian) {
    double beq = 0.0;
    if (j > cal.j_retire + cal.bequest_from_offset)
      beq = (1.0 - s_j) * cal.beta * lc::warm_glow(g.assets(ian), cal, in.est);
    double w = beq;
    if (next) {
      double acc = 0.0;
      for (int izp = 0; izp < nz2; ++izp) {
        double acc_e = 0.0;
        for (int iep = 0; iep < ne2; ++iep) {
          const double q = in.edist.probs(iep);
          if (q > 0.0) acc_e += q * (*next)((ian * nz2 + izp) * ne2 + iep);
        }
        const double p = in.zchain.transition(iz, izp);
        if (p > 0.0) acc += p * acc_e;
      }
      w = sb * acc + beq;
    }
    W[ian] = w;
  }

  BruteChoice best;
  for_each_combo(j, k, in, [&](const ComboItem& cm) {
    const double cbase = fs.cash + fs.k1t * cm.m1 + fs.k2t * cm.m2 + (cm.pl ? fs.ypl : 0.0);
    for (int ian = 0; ian < na; ++ian) {
      const double c = cbase - g.assets(ian);
      if (c <= 0.0) break;
      const double v = fs.coefC * std::pow(c, fs.pc) + cm.utime + W[ian];
      const int fl =
          ((((cm.pl * nL + cm.iL1) * nT + cm.iT1) * nL + cm.iL2) * nT + cm.iT2) * na + ian;
      if (v > best.value || (v == best.value && fl < best.flat)) {
        best.value = v;
        best.flat = fl;
        best.cp.ia_next = static_cast<std::int16_t>(ian);
        best.cp.iL1 = static_cast<std::int8_t>(cm.iL1);
        best.cp.iL2 = static_cast<std::int8_t>(cm.iL2);
        best.cp.iT1 = static_cast<std::int8_t>(cm.iT1);
        best.cp.iT2 = static_cast<std::int8_t>(cm.iT2);
        best.cp.pl = static_cast<std::uint8_t>(cm.pl);
      }
    }
  });
  return best;
}

struct BruteSolution {
  std::vector<Eigen::ArrayXd> value[2];
  std::vector<std::vector<lc::ChoicePoint>> policy[2];
};

inline BruteSolution brute_solve(const lc::ModelInputs& in, bool allow_birth = true) {
  const auto& cal = in.cal;
  const auto& gs = in.gspec;
  const int n_ages = cal.n_ages();
  const int n_states = lc::states_per_age(gs);
  const int nz2 = gs.n_z * gs.n_z;
  const int ne2 = gs.n_e * gs.n_e;

  BruteSolution bs;
  for (int k = 0; k < 2; ++k) {
    bs.value[k].resize(n_ages);
    bs.policy[k].resize(n_ages);
  }
  for (int j = cal.j_max; j >= cal.j_entry; --j) {
    const int jr = j - cal.j_entry;
    for (int k = 1; k >= 0; --k) {
      if (k == lc::kWithChild && j < cal.j_birth) continue;
      const Eigen::ArrayXd* next = (j < cal.j_max) ? &bs.value[k][jr + 1] : nullptr;
      Eigen::ArrayXd v(n_states);
      std::vector<lc::ChoicePoint> pol(n_states);
      for (int idx = 0; idx < n_states; ++idx) {
        const int ie = idx % ne2;
        const int iz = (idx / ne2) % nz2;
        const int ia = idx / (ne2 * nz2);
        BruteChoice bc = brute_best(j, k, ia, iz, ie, next, in);
        v(idx) = bc.value;
        pol[idx] = bc.cp;
      }
      if (k == lc::kChildless && allow_birth && j == cal.j_birth) {
        for (int idx = 0; idx < n_states; ++idx)
          if (bs.value[1][jr](idx) > v(idx)) {
            v(idx) = bs.value[1][jr](idx);
            pol[idx] = bs.policy[1][jr][idx];
            pol[idx].birth = 1;
          }
      }
      bs.value[k][jr] = std::move(v);
      bs.policy[k][jr] = std::move(pol);
    }
  }
  return bs;
}

inline bool same_choice(const lc::ChoicePoint& a, const lc::ChoicePoint& b) {
  if (!a.valid() && !b.valid()) return true;
  return a.ia_next == b.ia_next && a.iL1 == b.iL1 && a.iL2 == b.iL2 && a.iT1 == b.iT1 &&
         a.iT2 == b.iT2 && a.birth == b.birth && a.pl == b.pl;
}

// |a-b| with two -inf counting as equal
inline double value_gap(double a, double b) {
  if (a == b) return 0.0;
  return std::abs(a - b);
}

}  // namespace lct
