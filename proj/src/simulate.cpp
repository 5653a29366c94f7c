#include "lc/simulate.hpp"

#include <cmath>
#include <stdexcept>

namespace lc {

namespace {

// running weighted sums for one age row
struct Accum {
  double mass = 0.0;
  double birth = 0.0, pl = 0.0;
  double m1 = 0.0, hw1 = 0.0, t1 = 0.0, l1 = 0.0;
  double m2 = 0.0, hw2 = 0.0, t2 = 0.0, l2 = 0.0;
  double e1 = 0.0, e2 = 0.0, a = 0.0;
};

void resize_profile(AgeProfile& p, int n) {
  p.age.resize(n);
  for (auto* v : {&p.prob_birth, &p.prob_pl, &p.market1, &p.housework1, &p.childcare1,
                  &p.leisure1, &p.market2, &p.housework2, &p.childcare2, &p.leisure2, &p.earn1,
                  &p.earn2, &p.earn_hh, &p.assets})
    v->setZero(n);
}

void finalize_row(AgeProfile& p, int row, int j, const Accum& ac, double scale) {
  p.age(row) = j;
  if (ac.mass <= 0.0) return;
  const double inv = scale / ac.mass;
  p.prob_birth(row) = ac.birth * inv;
  p.prob_pl(row) = ac.pl * inv;
  p.market1(row) = 24.0 * ac.m1 * inv;
  p.housework1(row) = 24.0 * ac.hw1 * inv;
  p.childcare1(row) = 24.0 * ac.t1 * inv;
  p.leisure1(row) = 24.0 * ac.l1 * inv;
  p.market2(row) = 24.0 * ac.m2 * inv;
  p.housework2(row) = 24.0 * ac.hw2 * inv;
  p.childcare2(row) = 24.0 * ac.t2 * inv;
  p.leisure2(row) = 24.0 * ac.l2 * inv;
  p.earn1(row) = ac.e1 * inv;
  p.earn2(row) = ac.e2 * inv;
  p.earn_hh(row) = (ac.e1 + ac.e2) * inv;
  p.assets(row) = ac.a * inv;
}

}  // namespace

int AgeProfile::row_of(int j) const {
  for (int i = 0; i < n(); ++i)
    if (age(i) == j) return i;
  return -1;
}

std::vector<std::string> AgeProfile::csv_header() const {
  return {"age",       "prob_birth", "prob_pl",    "market1", "housework1",
          "childcare1", "leisure1",  "market2",    "housework2", "childcare2",
          "leisure2",  "earn1",      "earn2",      "earn_hh", "assets"};
}

std::vector<std::vector<double>> AgeProfile::csv_rows() const {
  std::vector<std::vector<double>> rows;
  rows.reserve(n());
  for (int i = 0; i < n(); ++i)
    rows.push_back({static_cast<double>(age(i)), prob_birth(i), prob_pl(i), market1(i),
                    housework1(i), childcare1(i), leisure1(i), market2(i), housework2(i),
                    childcare2(i), leisure2(i), earn1(i), earn2(i), earn_hh(i), assets(i)});
  return rows;
}

SimResult simulate_distribution(const ModelInputs& in, const Solution& sol,
                                const SimOptions& opt) {
  const auto& cal = in.cal;
  const auto& gs = in.gspec;
  const Grids g = in.grids();
  const int na = gs.n_assets;
  const int nz2 = gs.n_z * gs.n_z;
  const int ne2 = gs.n_e * gs.n_e;
  const int n_states = states_per_age(gs);
  const int n_ages = cal.n_ages();

  SimResult out;
  resize_profile(out.overall, n_ages);
  resize_profile(out.with_child, n_ages);
  resize_profile(out.childless, n_ages);

  // measure over (k, within-age state); everyone starts childless, broke, and
  // with shocks drawn from their stationary/unconditional laws
  std::vector<Eigen::ArrayXd> mu(2, Eigen::ArrayXd::Zero(n_states));
  for (int iz = 0; iz < nz2; ++iz)
    for (int ie = 0; ie < ne2; ++ie)
      mu[0](flatten_within_age(0, iz, ie, gs)) =
          in.zchain.stationary(iz) * in.edist.probs(ie);

  double cum_survival = 1.0;

  for (int j = cal.j_entry; j <= cal.j_max; ++j) {
    const int jrel = j - cal.j_entry;
    std::vector<Eigen::ArrayXd> mu_next(2, Eigen::ArrayXd::Zero(n_states));
    Accum acc[2];  // by branch of the year actually lived (birth counts as with-child)
    const double total_mass = mu[0].sum() + (sol.has_branch(1, j) ? mu[1].sum() : 0.0);
    out.max_mass_residual = std::max(out.max_mass_residual, std::abs(total_mass - 1.0));

    for (int k = 0; k < 2; ++k) {
      if (k == kWithChild && !sol.has_branch(k, j)) continue;
      const AgeSlice& slice = sol.at(k, j);
      for (int idx = 0; idx < n_states; ++idx) {
        const double m = mu[k](idx);
        if (m <= 0.0) continue;
        const ChoicePoint& cp = slice.policy[idx];
        if (!cp.valid()) {
          StateIndex s = unflatten(static_cast<std::int64_t>(jrel) * n_states + idx, k, gs, cal);
          throw std::runtime_error(
              "simulate: mass reached an infeasible state (j=" + std::to_string(s.j) +
              " k=" + std::to_string(s.k) + " ia=" + std::to_string(s.ia) +
              " iz=" + std::to_string(s.iz) + " ie=" + std::to_string(s.ie) + ")");
        }
        const int ie = idx % ne2;
        const int iz = (idx / ne2) % nz2;
        const int ia = idx / (ne2 * nz2);

        const int k_eff = (k == kChildless && cp.birth) ? kWithChild : k;
        const int jc = child_age(j, k_eff, cal);
        const bool active = parenting_active(jc, cal);
        const TimeAlloc t = resolve_times(cp, active, g, cal);
        const FlowBreakdown f = compute_flows(
            j, jc, t, in.zchain.nodes(iz, 0), in.edist.nodes(ie, 0), in.zchain.nodes(iz, 1),
            in.edist.nodes(ie, 1), in.ages.kappa1(jrel), in.ages.kappa2(jrel), in.ages.pension,
            cp.pl != 0, in.type.uses_nursery, g.assets(ia), g.assets(cp.ia_next), cal);
        if (!(f.consumption > 0.0))
          throw std::runtime_error("simulate: nonpositive consumption on the chosen path");

        // identity diagnostics, re-summed from parts
        const double tr1 = std::abs(t.L1 + t.T1 + t.m1 + cal.hw_hours_1 - 1.0);
        const double tr2 = std::abs(t.L2 + t.T2 + t.m2 + cal.hw_hours_2 - 1.0);
        const double br = std::abs((f.consumption + f.fee + f.a_next) -
                                   ((1.0 + cal.r) * f.assets + f.earn1 + f.earn2 +
                                    f.pl_income + f.pension));
        out.max_time_residual = std::max({out.max_time_residual, tr1, tr2});
        out.max_budget_residual = std::max(out.max_budget_residual, br);

        Accum& a = acc[k_eff];
        a.mass += m;
        a.birth += m * (cp.birth ? 1.0 : 0.0);
        a.pl += m * (cp.pl ? 1.0 : 0.0);
        a.m1 += m * t.m1;
        a.hw1 += m * cal.hw_hours_1;
        a.t1 += m * t.T1;
        a.l1 += m * t.L1;
        a.m2 += m * t.m2;
        a.hw2 += m * cal.hw_hours_2;
        a.t2 += m * t.T2;
        a.l2 += m * t.L2;
        a.e1 += m * f.earn1;
        a.e2 += m * f.earn2;
        a.a += m * f.assets;

        if (j == cal.j_birth && k == kChildless && cp.birth) out.birth_rate += m;

        if (j < cal.j_max) {
          const int k_next = k_eff;
          for (int izp = 0; izp < nz2; ++izp) {
            const double pz = in.zchain.transition(iz, izp);
            if (pz <= 0.0) continue;
            for (int iep = 0; iep < ne2; ++iep) {
              const double q = in.edist.probs(iep);
              if (q <= 0.0) continue;
              mu_next[k_next](flatten_within_age(cp.ia_next, izp, iep, gs)) += m * pz * q;
            }
          }
        }
      }
    }

    double top = 0.0;
    for (int k = 0; k < 2; ++k)
      for (int iz = 0; iz < nz2; ++iz)
        for (int ie = 0; ie < ne2; ++ie) top += mu[k](flatten_within_age(na - 1, iz, ie, gs));
    out.top_asset_mass = std::max(out.top_asset_mass, top);

    const double scale = opt.survival_weighted ? cum_survival : 1.0;
    Accum both;
    both.mass = acc[0].mass + acc[1].mass;
    both.birth = acc[0].birth + acc[1].birth;
    both.pl = acc[0].pl + acc[1].pl;
    both.m1 = acc[0].m1 + acc[1].m1;
    both.hw1 = acc[0].hw1 + acc[1].hw1;
    both.t1 = acc[0].t1 + acc[1].t1;
    both.l1 = acc[0].l1 + acc[1].l1;
    both.m2 = acc[0].m2 + acc[1].m2;
    both.hw2 = acc[0].hw2 + acc[1].hw2;
    both.t2 = acc[0].t2 + acc[1].t2;
    both.l2 = acc[0].l2 + acc[1].l2;
    both.e1 = acc[0].e1 + acc[1].e1;
    both.e2 = acc[0].e2 + acc[1].e2;
    both.a = acc[0].a + acc[1].a;
    finalize_row(out.overall, jrel, j, both, scale);
    finalize_row(out.childless, jrel, j, acc[0], scale);
    finalize_row(out.with_child, jrel, j, acc[1], scale);

    mu = std::move(mu_next);
    cum_survival *= in.ages.survival(jrel);
  }

  if (out.top_asset_mass > 0.01)
    out.warnings.push_back("more than 1% of mass sits on the top asset node (" +
                           std::to_string(out.top_asset_mass) + "); consider a larger asset_max");
  return out;
}

AgeProfile aggregate_types(const std::vector<AgeProfile>& profiles,
                           const std::vector<double>& weights) {
  if (profiles.empty() || profiles.size() != weights.size())
    throw std::invalid_argument("aggregate: need one weight per profile");
  double wsum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("aggregate: negative weight");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-10)
    throw std::invalid_argument("aggregate: weights must sum to 1");
  AgeProfile out = profiles[0];
  auto fields = [](AgeProfile& p) {
    return std::vector<Eigen::VectorXd*>{&p.prob_birth, &p.prob_pl, &p.market1, &p.housework1,
                                         &p.childcare1, &p.leisure1, &p.market2, &p.housework2,
                                         &p.childcare2, &p.leisure2, &p.earn1, &p.earn2,
                                         &p.earn_hh, &p.assets};
  };
  for (auto* f : fields(out)) f->setZero(out.n());
  for (size_t t = 0; t < profiles.size(); ++t) {
    if (profiles[t].n() != out.n() || (profiles[t].age.array() != out.age.array()).any())
      throw std::invalid_argument("aggregate: profiles must share the age axis");
    AgeProfile p = profiles[t];
    auto src = fields(p);
    auto dst = fields(out);
    for (size_t f = 0; f < src.size(); ++f) *dst[f] += weights[t] * *src[f];
  }
  return out;
}

int PenaltySeries::trough_time() const {
  int best = 0;
  for (int i = 1; i < gap.size(); ++i)
    if (gap(i) < gap(best)) best = i;
  return event_time(best);
}

double PenaltySeries::trough_gap() const {
  double g = gap(0);
  for (int i = 1; i < gap.size(); ++i) g = std::min(g, gap(i));
  return g;
}

PenaltySeries child_penalty(const AgeProfile& with_child, const AgeProfile& childless,
                            int horizon, int j_birth) {
  PenaltySeries ps;
  ps.event_time.resize(horizon + 1);
  ps.gap.resize(horizon + 1);
  for (int t = 0; t <= horizon; ++t) {
    const int rc = with_child.row_of(j_birth + t);
    const int rn = childless.row_of(j_birth + t);
    if (rc < 0 || rn < 0)
      throw std::invalid_argument("penalty: profiles must cover j_birth..j_birth+horizon");
    const double base = childless.earn2(rn);
    if (base == 0.0) throw std::invalid_argument("penalty: childless wife earnings are zero");
    ps.event_time(t) = t;
    ps.gap(t) = (with_child.earn2(rc) - base) / base;
  }
  return ps;
}

}  // namespace lc
