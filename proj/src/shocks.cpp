#include "lc/shocks.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

// symmetric-tridiagonal eigensolve shared by the quadrature rules
void golub_welsch(const Eigen::VectorXd& offdiag, Eigen::VectorXd& nodes,
                  Eigen::VectorXd& weights) {
  const int n = static_cast<int>(offdiag.size()) + 1;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) J(i, i + 1) = J(i + 1, i) = offdiag(i);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  nodes = es.eigenvalues();
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    weights(i) = v0 * v0;
  }
  weights /= weights.sum();
}

// Gauss-Legendre on [-1, 1]
void gauss_legendre(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  Eigen::VectorXd off(n - 1);
  for (int k = 1; k < n; ++k) off(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
  golub_welsch(off, nodes, weights);
  weights *= 2.0;  // golub_welsch normalizes to 1; Legendre total mass is 2
}

struct RectIntegrator {
  // one-dim conditional decomposition of a centered bivariate normal
  double s1, s12_over_s11, s_cond;
  Eigen::VectorXd gl_x, gl_w;

  RectIntegrator(double s11, double s12, double s22) {
    s1 = std::sqrt(s11);
    s12_over_s11 = s12 / s11;
    const double v = s22 - s12 * s12 / s11;
    s_cond = v > 0.0 ? std::sqrt(v) : 0.0;
    gauss_legendre(16, gl_x, gl_w);
  }

  double cond_prob(double t, double a2, double b2) const {
    const double mu = s12_over_s11 * t;
    if (s_cond == 0.0) return (mu >= a2 && mu < b2) ? 1.0 : 0.0;
    const double hi = b2 == kInf ? 1.0 : normal_cdf((b2 - mu) / s_cond);
    const double lo = a2 == -kInf ? 0.0 : normal_cdf((a2 - mu) / s_cond);
    return hi - lo;
  }

  // P(eps1 in [a1,b1], eps2 in [a2,b2])
  double rect(double a1, double b1, double a2, double b2) const {
    const double clip = 10.0 * s1;
    double lo = std::max(a1, -clip), hi = std::min(b1, clip);
    if (lo >= hi) return 0.0;
    // composite GL, pieces no wider than half an innovation std
    const int pieces = std::max(1, static_cast<int>(std::ceil((hi - lo) / (0.5 * s1))));
    const double step = (hi - lo) / pieces;
    const double inv_s1 = 1.0 / s1;
    const double norm = 0.3989422804014326779 * inv_s1;  // 1/sqrt(2*pi)/s1
    double total = 0.0;
    for (int p = 0; p < pieces; ++p) {
      const double c = lo + (p + 0.5) * step;
      const double h = 0.5 * step;
      double acc = 0.0;
      for (int q = 0; q < gl_x.size(); ++q) {
        const double t = c + h * gl_x(q);
        const double ts = t * inv_s1;
        acc += gl_w(q) * std::exp(-0.5 * ts * ts) * cond_prob(t, a2, b2);
      }
      total += acc * h * norm;
    }
    return total;
  }
};

}  // namespace

void gauss_hermite(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  if (n < 1) throw std::invalid_argument("shocks: gauss_hermite needs n >= 1");
  if (n == 1) {
    nodes = Eigen::VectorXd::Zero(1);
    weights = Eigen::VectorXd::Ones(1);
    return;
  }
  Eigen::VectorXd off(n - 1);
  for (int k = 1; k < n; ++k) off(k - 1) = std::sqrt(static_cast<double>(k));
  golub_welsch(off, nodes, weights);
}

Eigen::VectorXd stationary_of(const Eigen::MatrixXd& P) {
  const int n = static_cast<int>(P.rows());
  Eigen::MatrixXd A = P.transpose() - Eigen::MatrixXd::Identity(n, n);
  A.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  Eigen::VectorXd pi = A.fullPivLu().solve(b);
  for (int i = 0; i < n; ++i)
    if (pi(i) < 0.0) pi(i) = 0.0;  // scrub solver dust
  return pi / pi.sum();
}

UnivariateChain tauchen(double rho, double sigma2_eps, int n, double width) {
  if (n < 1) throw std::invalid_argument("shocks: tauchen needs n >= 1");
  UnivariateChain out;
  if (n == 1) {
    out.nodes = Eigen::VectorXd::Zero(1);
    out.transition = Eigen::MatrixXd::Ones(1, 1);
    return out;
  }
  if (std::abs(rho) >= 1.0) throw std::invalid_argument("shocks: tauchen needs |rho| < 1");
  if (sigma2_eps <= 0.0) throw std::invalid_argument("shocks: tauchen needs sigma2_eps > 0");
  const double sig_z = std::sqrt(sigma2_eps / (1.0 - rho * rho));
  const double sig_e = std::sqrt(sigma2_eps);
  const double span = width * sig_z;
  out.nodes = Eigen::VectorXd::LinSpaced(n, -span, span);
  const double half = span / (n - 1);  // half cell width
  out.transition.resize(n, n);
  for (int i = 0; i < n; ++i) {
    const double mean = rho * out.nodes(i);
    for (int j = 0; j < n; ++j) {
      const double lo = (j == 0) ? -kInf : (out.nodes(j) - half - mean) / sig_e;
      const double hi = (j == n - 1) ? kInf : (out.nodes(j) + half - mean) / sig_e;
      const double plo = (lo == -kInf) ? 0.0 : normal_cdf(lo);
      const double phi = (hi == kInf) ? 1.0 : normal_cdf(hi);
      out.transition(i, j) = phi - plo;
    }
    out.transition.row(i) /= out.transition.row(i).sum();
  }
  return out;
}

void validate(const ShockParams& sp) {
  auto fail = [](const std::string& m) { throw std::invalid_argument("shocks: " + m); };
  if (sp.rho12 != 0.0 || sp.rho21 != 0.0) fail("cross-persistence must be zero");
  if (std::abs(sp.rho11) >= 1.0 || std::abs(sp.rho22) >= 1.0) fail("need |rho| < 1");
  for (const auto* m : {&sp.sigma_eps, &sp.sigma_e}) {
    if (std::abs((*m)(0, 1) - (*m)(1, 0)) > 1e-14) fail("covariance matrix must be symmetric");
    if ((*m)(0, 0) < 0.0 || (*m)(1, 1) < 0.0 || (*m).determinant() < -1e-12)
      fail("covariance matrix must be positive semidefinite");
  }
  if (sp.tauchen_width <= 0.0) fail("tauchen_width must be > 0");
}

MarkovChain discretize_var(const ShockParams& sp, int n_per_dim) {
  validate(sp);
  if (n_per_dim < 1) throw std::invalid_argument("shocks: need n_per_dim >= 1");

  const UnivariateChain c1 = tauchen(sp.rho11, n_per_dim == 1 ? 1.0 : sp.sigma_eps(0, 0),
                                     n_per_dim, sp.tauchen_width);
  const UnivariateChain c2 = tauchen(sp.rho22, n_per_dim == 1 ? 1.0 : sp.sigma_eps(1, 1),
                                     n_per_dim, sp.tauchen_width);

  MarkovChain out;
  out.n1 = out.n2 = n_per_dim;
  const int m = out.size();
  out.nodes.resize(m, 2);
  for (int i1 = 0; i1 < n_per_dim; ++i1)
    for (int i2 = 0; i2 < n_per_dim; ++i2) {
      out.nodes(i1 * n_per_dim + i2, 0) = c1.nodes(i1);
      out.nodes(i1 * n_per_dim + i2, 1) = c2.nodes(i2);
    }

  out.transition.resize(m, m);
  if (n_per_dim == 1) {
    out.transition.setOnes();
  } else if (sp.sigma_eps(0, 1) == 0.0) {
    // independent innovations: exact Kronecker product of the marginals
    for (int i1 = 0; i1 < n_per_dim; ++i1)
      for (int i2 = 0; i2 < n_per_dim; ++i2)
        for (int j1 = 0; j1 < n_per_dim; ++j1)
          for (int j2 = 0; j2 < n_per_dim; ++j2)
            out.transition(i1 * n_per_dim + i2, j1 * n_per_dim + j2) =
                c1.transition(i1, j1) * c2.transition(i2, j2);
  } else {
    const RectIntegrator ri(sp.sigma_eps(0, 0), sp.sigma_eps(0, 1), sp.sigma_eps(1, 1));
    const double half1 = (c1.nodes(1) - c1.nodes(0)) * 0.5;
    const double half2 = (c2.nodes(1) - c2.nodes(0)) * 0.5;
    for (int i1 = 0; i1 < n_per_dim; ++i1)
      for (int i2 = 0; i2 < n_per_dim; ++i2) {
        const int row = i1 * n_per_dim + i2;
        const double m1 = sp.rho11 * c1.nodes(i1);
        const double m2 = sp.rho22 * c2.nodes(i2);
        for (int j1 = 0; j1 < n_per_dim; ++j1)
          for (int j2 = 0; j2 < n_per_dim; ++j2) {
            const double a1 = (j1 == 0) ? -kInf : c1.nodes(j1) - half1 - m1;
            const double b1 = (j1 == n_per_dim - 1) ? kInf : c1.nodes(j1) + half1 - m1;
            const double a2 = (j2 == 0) ? -kInf : c2.nodes(j2) - half2 - m2;
            const double b2 = (j2 == n_per_dim - 1) ? kInf : c2.nodes(j2) + half2 - m2;
            out.transition(row, j1 * n_per_dim + j2) = ri.rect(a1, b1, a2, b2);
          }
        out.transition.row(row) /= out.transition.row(row).sum();
      }
  }
  out.stationary = stationary_of(out.transition);
  return out;
}

DiscreteDistribution discretize_iid(const Eigen::Matrix2d& sigma, int n_per_dim) {
  if (n_per_dim < 1) throw std::invalid_argument("shocks: need n_per_dim >= 1");
  if (std::abs(sigma(0, 1) - sigma(1, 0)) > 1e-14)
    throw std::invalid_argument("shocks: covariance matrix must be symmetric");
  if (sigma(0, 0) < 0.0 || sigma(1, 1) < 0.0 || sigma.determinant() < -1e-12)
    throw std::invalid_argument("shocks: covariance matrix must be positive semidefinite");

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(sigma);
  Eigen::Vector2d lam = es.eigenvalues().cwiseMax(0.0);
  Eigen::Matrix2d Q = es.eigenvectors();
  for (int c = 0; c < 2; ++c)  // pin the sign convention
    if (Q(std::abs(Q(0, c)) >= std::abs(Q(1, c)) ? 0 : 1, c) < 0.0) Q.col(c) *= -1.0;

  Eigen::VectorXd gh_x, gh_w;
  gauss_hermite(n_per_dim, gh_x, gh_w);
  const int center = (n_per_dim - 1) / 2;

  std::array<Eigen::VectorXd, 2> pcs, pws;
  for (int d = 0; d < 2; ++d) {
    if (lam(d) <= 1e-14) {
      pcs[d] = Eigen::VectorXd::Zero(n_per_dim);
      pws[d] = Eigen::VectorXd::Zero(n_per_dim);
      pws[d](center) = 1.0;
    } else {
      pcs[d] = gh_x * std::sqrt(lam(d));
      pws[d] = gh_w;
    }
  }

  DiscreteDistribution out;
  const int m = n_per_dim * n_per_dim;
  out.nodes.resize(m, 2);
  out.probs.resize(m);
  for (int i = 0; i < n_per_dim; ++i)
    for (int j = 0; j < n_per_dim; ++j) {
      const Eigen::Vector2d u(pcs[0](i), pcs[1](j));
      const Eigen::Vector2d x = Q * u;
      const int row = i * n_per_dim + j;
      out.nodes(row, 0) = x(0);
      out.nodes(row, 1) = x(1);
      out.probs(row) = pws[0](i) * pws[1](j);
    }
  return out;
}

}  // namespace lc
