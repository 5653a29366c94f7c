#pragma once

#include <Eigen/Dense>

#include "lc/params.hpp"

namespace lc {

// Joint productivity shock process for the couple. Matrix entries are
// variances / covariances of the log shocks; cross-persistence must be zero.
struct ShockParams {
  double rho11 = 0.9;  // husband persistence
  double rho22 = 0.7;  // wife persistence
  double rho12 = 0.0;
  double rho21 = 0.0;
  Eigen::Matrix2d sigma_eps = (Eigen::Matrix2d() << 0.0303, 0.0027, 0.0027, 0.0382).finished();
  Eigen::Matrix2d sigma_e = (Eigen::Matrix2d() << 0.10, 0.05, 0.05, 0.10).finished();
  double tauchen_width = 1.3;  // node span in stationary std devs per dimension
};

// Finite chain over joint persistent states. Row i of `nodes` is the (z1, z2)
// pair for joint index i = i1*n2 + i2 (husband-major).
struct MarkovChain {
  int n1 = 0, n2 = 0;
  Eigen::MatrixXd nodes;       // (n1*n2) x 2
  Eigen::MatrixXd transition;  // rows sum to 1
  Eigen::VectorXd stationary;  // left fixed point
  int size() const { return n1 * n2; }
};

// iid joint draw for the transitory pair; same layout as MarkovChain::nodes.
struct DiscreteDistribution {
  Eigen::MatrixXd nodes;  // m x 2
  Eigen::VectorXd probs;  // sums to 1
  int size() const { return static_cast<int>(probs.size()); }
};

struct UnivariateChain {
  Eigen::VectorXd nodes;
  Eigen::MatrixXd transition;
};

// Evenly spaced nodes over +-width stationary std devs, cell-boundary normal
// probabilities. Requires |rho| < 1 and sigma2_eps > 0 (any values ok at n=1).
UnivariateChain tauchen(double rho, double sigma2_eps, int n, double width);

// Product-of-Tauchen node grid; transition probabilities assign the correlated
// innovation pair to cell rectangles, so sigma_eps off-diagonals are honored.
MarkovChain discretize_var(const ShockParams& sp, int n_per_dim);

// Transitory pair: Gauss-Hermite nodes on the principal components, rotated
// back. A zero-variance component collapses to a point mass at 0.
DiscreteDistribution discretize_iid(const Eigen::Matrix2d& sigma, int n_per_dim);

inline double productivity_multiplier(double z, double e) { return std::exp(z + e); }

// left fixed point of a row-stochastic matrix (direct linear solve)
Eigen::VectorXd stationary_of(const Eigen::MatrixXd& P);

// probabilists' Gauss-Hermite rule for N(0,1): nodes and weights, weights sum 1
void gauss_hermite(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

void validate(const ShockParams& sp);

}  // namespace lc
