#include "depsvm/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <stdexcept>

namespace depsvm {

namespace {
constexpr int kAlphabetCap = 16;

// Matrix power by repeated squaring; entries drift from row-stochasticity by
// at most a few ulps per squaring, tracked by the caller where it matters.
Eigen::MatrixXd matrix_power(const Eigen::MatrixXd& t, int e) {
  const int m = static_cast<int>(t.rows());
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(m, m);
  Eigen::MatrixXd base = t;
  while (e > 0) {
    if (e & 1) result = result * base;
    base = base * base;
    e >>= 1;
  }
  return result;
}

// For a fixed row event A, the best column event for both alpha and phi is
// the set of columns with positive (or negative) slack, and the two signs
// give equal mass because the slacks sum to zero.
double best_column_slack(const Eigen::MatrixXd& probs, const Eigen::VectorXd& col,
                         unsigned mask) {
  const int rows = static_cast<int>(probs.rows());
  const int cols = static_cast<int>(probs.cols());
  double mass_a = 0.0;
  Eigen::VectorXd row_sum = Eigen::VectorXd::Zero(cols);
  for (int i = 0; i < rows; ++i) {
    if (mask & (1u << i)) {
      mass_a += probs.row(i).sum();
      row_sum += probs.row(i).transpose();
    }
  }
  double positive = 0.0;
  for (int j = 0; j < cols; ++j)
    positive += std::max(0.0, row_sum(j) - mass_a * col(j));
  return positive;
}

}  // namespace

FiniteJoint::FiniteJoint(Eigen::MatrixXd probs) : probs_(std::move(probs)) {
  if (probs_.rows() < 1 || probs_.cols() < 1)
    throw std::invalid_argument("FiniteJoint: empty table");
  double total = 0.0;
  for (Eigen::Index i = 0; i < probs_.rows(); ++i)
    for (Eigen::Index j = 0; j < probs_.cols(); ++j) {
      if (probs_(i, j) < 0.0) throw std::invalid_argument("FiniteJoint: negative entry");
      total += probs_(i, j);
    }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("FiniteJoint: probabilities must sum to 1");
}

double alpha_coefficient(const FiniteJoint& joint) {
  // enumerate over the smaller alphabet
  const bool flip = joint.rows() > joint.cols();
  const Eigen::MatrixXd probs =
      flip ? Eigen::MatrixXd(joint.probs().transpose()) : joint.probs();
  const int rows = static_cast<int>(probs.rows());
  if (rows > kAlphabetCap || probs.cols() > kAlphabetCap)
    throw std::invalid_argument("alpha_coefficient: alphabet exceeds enumeration cap");
  const Eigen::VectorXd col = probs.colwise().sum().transpose();
  double best = 0.0;
  const unsigned limit = 1u << rows;
  for (unsigned mask = 1; mask + 1 < limit; ++mask)
    best = std::max(best, best_column_slack(probs, col, mask));
  return best;
}

double beta_coefficient(const FiniteJoint& joint) {
  const Eigen::VectorXd r = joint.row_marginal();
  const Eigen::VectorXd c = joint.col_marginal();
  double acc = 0.0;
  for (int i = 0; i < joint.rows(); ++i)
    for (int j = 0; j < joint.cols(); ++j)
      acc += std::abs(joint.probs()(i, j) - r(i) * c(j));
  return 0.5 * acc;
}

double phi_coefficient(const FiniteJoint& joint) {
  const Eigen::MatrixXd& probs = joint.probs();
  const int rows = joint.rows();
  if (rows > kAlphabetCap || joint.cols() > kAlphabetCap)
    throw std::invalid_argument("phi_coefficient: alphabet exceeds enumeration cap");
  const Eigen::VectorXd col = joint.col_marginal();
  double best = 0.0;
  const unsigned limit = 1u << rows;
  for (unsigned mask = 1; mask < limit; ++mask) {
    double mass_a = 0.0;
    for (int i = 0; i < rows; ++i)
      if (mask & (1u << i)) mass_a += probs.row(i).sum();
    if (mass_a <= 0.0) continue;  // 0/0 convention
    best = std::max(best, best_column_slack(probs, col, mask) / mass_a);
  }
  return best;
}

double phi_sym_coefficient(const FiniteJoint& joint) {
  return std::sqrt(phi_coefficient(joint) * phi_coefficient(joint.transposed()));
}

double r2_coefficient(const FiniteJoint& joint) {
  const Eigen::VectorXd r = joint.row_marginal();
  const Eigen::VectorXd c = joint.col_marginal();
  std::vector<int> ri, ci;
  for (int i = 0; i < joint.rows(); ++i)
    if (r(i) > 0.0) ri.push_back(i);
  for (int j = 0; j < joint.cols(); ++j)
    if (c(j) > 0.0) ci.push_back(j);
  if (ri.size() < 2 || ci.size() < 2) return 0.0;

  Eigen::MatrixXd q(ri.size(), ci.size());
  for (std::size_t a = 0; a < ri.size(); ++a)
    for (std::size_t b = 0; b < ci.size(); ++b) {
      const int i = ri[a], j = ci[b];
      q(a, b) = (joint.probs()(i, j) - r(i) * c(j)) / std::sqrt(r(i) * c(j));
    }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(q);
  const double sigma = svd.singularValues()(0);
  return std::min(1.0, sigma);
}

double rio_bound(double alpha, double phi_sym, double p) {
  if (p < 2.0) throw std::invalid_argument("rio_bound: p must be >= 2");
  const double ea = 1.0 - 2.0 / p;
  const double ep = 2.0 / p;
  auto pw = [](double base, double e) {
    if (e == 0.0) return 1.0;
    return std::pow(base, e);
  };
  return 2.0 * M_PI * pw(alpha, ea) * pw(phi_sym, ep);
}

double coefficient_of(const FiniteJoint& joint, MixCoefficient coeff) {
  switch (coeff) {
    case MixCoefficient::Alpha: return alpha_coefficient(joint);
    case MixCoefficient::Beta: return beta_coefficient(joint);
    case MixCoefficient::Phi: return phi_coefficient(joint);
    case MixCoefficient::PhiSym: return phi_sym_coefficient(joint);
    case MixCoefficient::R2: return r2_coefficient(joint);
  }
  return 0.0;
}

MixingReport mixing_report(const FiniteJoint& joint, int lag) {
  MixingReport rep;
  rep.lag = lag;
  rep.alpha = alpha_coefficient(joint);
  rep.beta = beta_coefficient(joint);
  rep.phi_row = phi_coefficient(joint);
  rep.phi_col = phi_coefficient(joint.transposed());
  rep.phi_sym = std::sqrt(rep.phi_row * rep.phi_col);
  rep.r2 = r2_coefficient(joint);
  rep.rio_bound_p2 = rio_bound(rep.alpha, rep.phi_sym, 2.0);
  return rep;
}

FiniteJoint markov_lag_joint(const MarkovChainSpec& chain, int i, int j) {
  if (i == j) throw std::invalid_argument("markov_lag_joint: indices must differ");
  if (i < 1 || j < 1) throw std::invalid_argument("markov_lag_joint: indices start at 1");
  const int lo = std::min(i, j), hi = std::max(i, j);
  const Eigen::MatrixXd marg_pow = matrix_power(chain.trans, lo - 1);
  const Eigen::MatrixXd cond = matrix_power(chain.trans, hi - lo);
  const Eigen::VectorXd nu = (chain.init.transpose() * marg_pow).transpose();
  Eigen::MatrixXd probs = nu.asDiagonal() * cond;
  const double total = probs.sum();
  if (std::abs(total - 1.0) > 1e-12) {
    std::cerr << "markov_lag_joint: renormalizing, drift " << std::abs(total - 1.0)
              << " at (" << i << "," << j << ")\n";
    probs /= total;
  }
  return FiniteJoint(probs);
}

namespace {

bool is_stationary(const MarkovChainSpec& chain) {
  const Eigen::RowVectorXd nu = chain.init.transpose();
  return (nu * chain.trans - nu).cwiseAbs().maxCoeff() < 1e-13;
}

}  // namespace

double bi_mixing_average(const MarkovChainSpec& chain, int n, MixCoefficient coeff) {
  if (n < 1) throw std::invalid_argument("bi_mixing_average: n must be >= 1");
  if (!is_stationary(chain)) return bi_mixing_average_direct(chain, n, coeff);
  double acc = 0.0;
  for (int k = 1; k <= n - 1; ++k) {
    const double xi = coefficient_of(markov_lag_joint(chain, 1, 1 + k), coeff);
    acc += (n - k) * xi;
  }
  return acc / (static_cast<double>(n) * n);
}

double bi_mixing_average_direct(const MarkovChainSpec& chain, int n, MixCoefficient coeff) {
  if (n < 1) throw std::invalid_argument("bi_mixing_average: n must be >= 1");
  // xi(i, j) depends on (min(i,j), |i-j|) only; cache on that key
  std::map<std::pair<int, int>, double> cache;
  double acc = 0.0;
  for (int i = 2; i <= n; ++i)
    for (int j = 1; j < i; ++j) {
      const std::pair<int, int> key{j, i - j};
      auto it = cache.find(key);
      if (it == cache.end())
        it = cache.emplace(key, coefficient_of(markov_lag_joint(chain, j, i), coeff)).first;
      acc += it->second;
    }
  return acc / (static_cast<double>(n) * n);
}

double empirical_alpha(const std::vector<int>& path, int lag, int cap) {
  if (lag < 1) throw std::invalid_argument("empirical_alpha: lag must be >= 1");
  const int n = static_cast<int>(path.size());
  if (n < lag + 2) throw std::invalid_argument("empirical_alpha: path too short for lag");
  int hi = 0;
  for (int s : path) {
    if (s < 0) throw std::invalid_argument("empirical_alpha: negative state");
    hi = std::max(hi, s);
  }
  const int m = hi + 1;
  if (m > cap || m > kAlphabetCap)
    throw std::invalid_argument("empirical_alpha: observed alphabet exceeds cap");
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i + lag < n; ++i) counts(path[i], path[i + lag]) += 1.0;
  return alpha_coefficient(FiniteJoint(counts / counts.sum()));
}

}  // namespace depsvm
