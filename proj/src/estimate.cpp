#include "lc/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "lc/csv.hpp"

namespace lc {

std::vector<MomentRow> compute_moments(const AgeProfile& model, const TimeUseTable& data,
                                       const GmmOptions& opt) {
  std::vector<MomentRow> rows;
  int dlo = data.age(0), dhi = data.age(data.age.size() - 1);
  for (int j = opt.age_lo; j <= opt.age_hi; ++j) {
    if (j < dlo || j > dhi) continue;
    int rm = model.row_of(j);
    if (rm < 0) continue;
    int rd = j - dlo;
    double work_model = model.market2(rm) + (opt.work_includes_housework ? model.housework2(rm) : 0.0);
    MomentRow w{j, MomentKind::kWork, work_model, data.work(rd), opt.weight_work};
    MomentRow l{j, MomentKind::kLeisure, model.leisure2(rm), data.leisure(rd), opt.weight_leisure};
    MomentRow c{j, MomentKind::kChildcare, model.childcare2(rm), data.childcare(rd),
                opt.weight_childcare};
    rows.push_back(w);
    rows.push_back(l);
    rows.push_back(c);
  }
  if (rows.empty()) throw std::runtime_error("no overlapping ages between model and data moments");
  return rows;
}

double moment_objective(const std::vector<MomentRow>& rows) {
  double acc = 0.0;
  for (const auto& r : rows) {
    double wr = r.weight * r.residual();
    acc += wr * wr;
  }
  return acc;
}

const std::vector<std::string>& theta_names() {
  static const std::vector<std::string> names = {
      "eta",           "psi_L1",        "psi_L2",          "psi_T1",
      "psi_T2",        "rho_L",         "rho_T",           "phi_L1_child",
      "phi_L2_child",  "phi_L1_nochild", "phi_L2_nochild", "phi_T1",
      "phi_T2",        "phi_C_child"};
  return names;
}

Eigen::VectorXd theta_pack(const EstimatedParams& p) {
  Eigen::VectorXd v(14);
  v << p.eta, p.psi_L1, p.psi_L2, p.psi_T1, p.psi_T2, p.rho_L, p.rho_T, p.phi_L1_child,
      p.phi_L2_child, p.phi_L1_nochild, p.phi_L2_nochild, p.phi_T1, p.phi_T2, p.phi_C_child;
  return v;
}

EstimatedParams theta_unpack(const Eigen::VectorXd& v) {
  if (v.size() != 14) throw std::runtime_error("parameter vector must have 14 entries");
  EstimatedParams p;
  p.eta = v(0);
  p.psi_L1 = v(1);
  p.psi_L2 = v(2);
  p.psi_T1 = v(3);
  p.psi_T2 = v(4);
  p.rho_L = v(5);
  p.rho_T = v(6);
  p.phi_L1_child = v(7);
  p.phi_L2_child = v(8);
  p.phi_L1_nochild = v(9);
  p.phi_L2_nochild = v(10);
  p.phi_T1 = v(11);
  p.phi_T2 = v(12);
  p.phi_C_child = v(13);
  return p;
}

void theta_bounds(Eigen::VectorXd& lo, Eigen::VectorXd& hi) {
  lo.resize(14);
  hi.resize(14);
  for (int i = 0; i < 5; ++i) {  // curvature parameters in (0,1)
    lo(i) = 0.01;
    hi(i) = 0.99;
  }
  for (int i = 5; i < 7; ++i) {  // aggregator exponents
    lo(i) = -0.95;
    hi(i) = 0.95;
  }
  for (int i = 7; i < 14; ++i) {  // utility shifters
    lo(i) = -30.0;
    hi(i) = 5.0;
  }
}

namespace {

Eigen::VectorXd clamp_box(Eigen::VectorXd x, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = std::clamp(x(i), lo(i), hi(i));
  return x;
}

struct SimplexState {
  std::vector<Eigen::VectorXd> v;
  std::vector<double> f;

  void sort() {
    std::vector<int> order(v.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return f[a] < f[b]; });
    std::vector<Eigen::VectorXd> v2;
    std::vector<double> f2;
    for (int i : order) {
      v2.push_back(v[i]);
      f2.push_back(f[i]);
    }
    v = std::move(v2);
    f = std::move(f2);
  }

  double scaled_diameter(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) const {
    double d = 0.0;
    for (size_t i = 1; i < v.size(); ++i)
      for (Eigen::Index j = 0; j < v[0].size(); ++j)
        d = std::max(d, std::abs(v[i](j) - v[0](j)) / std::max(hi(j) - lo(j), 1e-300));
    return d;
  }
};

}  // namespace

SimplexResult minimize_simplex(const std::function<double(const Eigen::VectorXd&)>& f,
                               const Eigen::VectorXd& x0, const Eigen::VectorXd& lo,
                               const Eigen::VectorXd& hi, const SimplexOptions& opt) {
  const int n = static_cast<int>(x0.size());
  if (n < 1) throw std::runtime_error("simplex minimizer needs at least one dimension");
  if (lo.size() != n || hi.size() != n) throw std::runtime_error("bound size mismatch");
  for (int j = 0; j < n; ++j)
    if (!(lo(j) < hi(j))) throw std::runtime_error("lower bound must be below upper bound");

  // dimension-adaptive expansion/contraction/shrink coefficients
  const double alpha = 1.0;
  const double beta = 1.0 + 2.0 / n;
  const double gamma = 0.75 - 0.5 / n;
  const double delta = 1.0 - 1.0 / n;

  SimplexResult out;
  out.x = clamp_box(x0, lo, hi);
  out.f = std::numeric_limits<double>::infinity();
  int evals = 0;

  auto eval = [&](const Eigen::VectorXd& x) {
    double y = f(x);
    ++evals;
    if (opt.on_eval) opt.on_eval(evals, y, x);
    if (y < out.f) {
      out.f = y;
      out.x = x;
    }
    return y;
  };

  // the start point is always scored, so a zero budget still reports f(x0)
  eval(out.x);

  const int passes = 1 + std::max(opt.restarts, 0);
  for (int pass = 0; pass < passes && evals < opt.max_evals; ++pass) {
    double step_rel = opt.init_step * std::pow(0.25, pass);
    SimplexState s;
    Eigen::VectorXd base = out.x;
    s.v.push_back(base);
    s.f.push_back(out.f);  // incumbent, already scored
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd vj = base;
      double step = step_rel * (hi(j) - lo(j));
      vj(j) = (base(j) + step <= hi(j)) ? base(j) + step : base(j) - step;
      vj = clamp_box(vj, lo, hi);
      s.v.push_back(vj);
      s.f.push_back(eval(vj));
      if (evals >= opt.max_evals) break;
    }
    while (static_cast<int>(s.v.size()) < n + 1) {  // budget ran out mid-init
      s.v.push_back(base);
      s.f.push_back(s.f[0]);
    }
    s.sort();

    while (evals < opt.max_evals) {
      if (s.scaled_diameter(lo, hi) < opt.tol) {
        out.converged = true;
        break;
      }
      Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
      for (int i = 0; i < n; ++i) centroid += s.v[i];
      centroid /= n;

      const double f_best = s.f[0], f_second = s.f[n - 1], f_worst = s.f[n];
      Eigen::VectorXd xr = clamp_box(centroid + alpha * (centroid - s.v[n]), lo, hi);
      double fr = eval(xr);

      if (fr < f_best && evals < opt.max_evals) {
        Eigen::VectorXd xe = clamp_box(centroid + beta * (xr - centroid), lo, hi);
        double fe = eval(xe);
        if (fe < fr) {
          s.v[n] = xe;
          s.f[n] = fe;
        } else {
          s.v[n] = xr;
          s.f[n] = fr;
        }
      } else if (fr < f_second) {
        s.v[n] = xr;
        s.f[n] = fr;
      } else if (evals < opt.max_evals) {
        bool outside = fr < f_worst;
        Eigen::VectorXd xc = outside ? clamp_box(centroid + gamma * (xr - centroid), lo, hi)
                                     : clamp_box(centroid - gamma * (xr - centroid), lo, hi);
        double fc = eval(xc);
        if (fc < std::min(fr, f_worst)) {
          s.v[n] = xc;
          s.f[n] = fc;
        } else {  // shrink toward the incumbent
          for (int i = 1; i <= n && evals < opt.max_evals; ++i) {
            s.v[i] = clamp_box(s.v[0] + delta * (s.v[i] - s.v[0]), lo, hi);
            s.f[i] = eval(s.v[i]);
          }
        }
      }
      s.sort();
    }
  }
  out.evals = evals;
  return out;
}

double gmm_objective(const ProfilePipeline& pipeline, const TimeUseTable& data,
                     const GmmOptions& opt, const EstimatedParams& p) {
  try {
    AgeProfile profile = pipeline(p);
    double obj = moment_objective(compute_moments(profile, data, opt));
    if (!std::isfinite(obj)) return opt.penalty;
    return obj;
  } catch (const std::exception&) {
    return opt.penalty;
  }
}

EstimateResult estimate(const ProfilePipeline& pipeline, const TimeUseTable& data,
                        const GmmOptions& opt, const EstimatedParams& start) {
  Eigen::VectorXd lo, hi;
  theta_bounds(lo, hi);
  Eigen::VectorXd theta0 = theta_pack(start);
  for (int j = 0; j < 14; ++j) theta0(j) = std::clamp(theta0(j), lo(j), hi(j));

  // select the coordinates the optimizer may move
  std::vector<int> free_idx;
  if (opt.free_names.empty()) {
    for (int j = 0; j < 14; ++j) free_idx.push_back(j);
  } else {
    const auto& names = theta_names();
    for (const auto& name : opt.free_names) {
      auto it = std::find(names.begin(), names.end(), name);
      if (it == names.end()) throw std::runtime_error("unknown parameter name: " + name);
      free_idx.push_back(static_cast<int>(it - names.begin()));
    }
  }
  const int nf = static_cast<int>(free_idx.size());

  auto embed = [&](const Eigen::VectorXd& xr) {
    Eigen::VectorXd full = theta0;
    for (int j = 0; j < nf; ++j) full(free_idx[j]) = xr(j);
    return full;
  };

  std::ofstream log;
  if (!opt.log_path.empty()) {
    log.open(opt.log_path, std::ios::binary);
    if (!log) throw std::runtime_error("cannot open log file: " + opt.log_path);
    log << "eval,objective";
    for (const auto& name : theta_names()) log << "," << name;
    log << "\n";
  }

  auto objective_reduced = [&](const Eigen::VectorXd& xr) {
    return gmm_objective(pipeline, data, opt, theta_unpack(embed(xr)));
  };

  Eigen::VectorXd x0(nf), rlo(nf), rhi(nf);
  for (int j = 0; j < nf; ++j) {
    x0(j) = theta0(free_idx[j]);
    rlo(j) = lo(free_idx[j]);
    rhi(j) = hi(free_idx[j]);
  }

  SimplexOptions sopt;
  sopt.max_evals = opt.max_evals;
  sopt.tol = opt.tol;
  sopt.restarts = opt.restarts;
  sopt.init_step = opt.init_step;
  if (log.is_open()) {
    sopt.on_eval = [&](int k, double y, const Eigen::VectorXd& xr) {
      Eigen::VectorXd full = embed(xr);
      log << k << "," << fmt_double(y);
      for (int j = 0; j < 14; ++j) log << "," << fmt_double(full(j));
      log << "\n";
      log.flush();
    };
  }

  SimplexResult r = minimize_simplex(objective_reduced, x0, rlo, rhi, sopt);

  EstimateResult out;
  out.params = theta_unpack(embed(r.x));
  out.objective = r.f;
  out.evals = r.evals;
  out.converged = r.converged;
  if (!r.converged) out.notes.push_back("optimizer stopped at the evaluation budget");
  try {
    out.moments = compute_moments(pipeline(out.params), data, opt);
  } catch (const std::exception& e) {
    out.notes.push_back(std::string("could not recompute moments at the optimum: ") + e.what());
  }
  return out;
}

}  // namespace lc
