#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "depsvm/process.hpp"

namespace depsvm {

/// Joint probability table of a pair of finite-valued random variables.
/// The pair of generated sigma-algebras is fully described by this table,
/// which is the substrate every mixing coefficient is computed from.
class FiniteJoint {
 public:
  explicit FiniteJoint(Eigen::MatrixXd probs);

  const Eigen::MatrixXd& probs() const { return probs_; }
  Eigen::VectorXd row_marginal() const { return probs_.rowwise().sum(); }
  Eigen::VectorXd col_marginal() const { return probs_.colwise().sum().transpose(); }
  FiniteJoint transposed() const { return FiniteJoint(probs_.transpose()); }
  int rows() const { return static_cast<int>(probs_.rows()); }
  int cols() const { return static_cast<int>(probs_.cols()); }

 private:
  Eigen::MatrixXd probs_;
};

/// alpha = sup_{A,B} |mu(A n B) - mu(A) mu(B)|, exact by enumerating the
/// subsets of the smaller alphabet (the inner sup has a closed form).
/// Alphabets are capped at 16 states per side.
double alpha_coefficient(const FiniteJoint& joint);

/// beta = (1/2) sum_ij |p_ij - r_i c_j|; the finest partition attains the
/// sup over partitions for finite alphabets.
double beta_coefficient(const FiniteJoint& joint);

/// phi = sup_{A,B} |mu(A n B) - mu(A) mu(B)| / mu(A) with A ranging over the
/// row variable's events (convention 0/0 = 0). Not symmetric; condition on
/// the column variable via phi_coefficient(joint.transposed()).
double phi_coefficient(const FiniteJoint& joint);

double phi_sym_coefficient(const FiniteJoint& joint);

/// Maximal correlation (the p = 2 coefficient): the largest singular value
/// of D_r^{-1/2} (P - r c^T) D_c^{-1/2}, zero-probability states dropped.
double r2_coefficient(const FiniteJoint& joint);

/// Upper bound 2*pi * alpha^(1-2/p) * phi_sym^(2/p) for the order-p maximal
/// correlation coefficient, p >= 2.
double rio_bound(double alpha, double phi_sym, double p);

struct MixingReport {
  int lag = 0;
  double alpha = 0.0;
  double beta = 0.0;
  double phi_row = 0.0;
  double phi_col = 0.0;
  double phi_sym = 0.0;
  double r2 = 0.0;
  double rio_bound_p2 = 0.0;
};

MixingReport mixing_report(const FiniteJoint& joint, int lag);

/// Exact joint of (Z_min(i,j), Z_max(i,j)) for a finite-state chain:
/// marginal init * trans^(min-1) on rows, conditional trans^|i-j| on columns.
FiniteJoint markov_lag_joint(const MarkovChainSpec& chain, int i, int j);

enum class MixCoefficient { Alpha, Beta, Phi, PhiSym, R2 };

/// (1/n^2) sum_{i=1..n} sum_{j<i} xi(Z_i, Z_j). Stationary chains use the
/// lag identity sum_{k<n} (n-k) xi(lag k); others the direct double sum.
double bi_mixing_average(const MarkovChainSpec& chain, int n, MixCoefficient coeff);

/// Direct double sum over all index pairs, with power caching. Kept next to
/// the shortcut so the two routes can be compared.
double bi_mixing_average_direct(const MarkovChainSpec& chain, int n, MixCoefficient coeff);

double coefficient_of(const FiniteJoint& joint, MixCoefficient coeff);

/// alpha of the empirical lag joint of an observed state path.
double empirical_alpha(const std::vector<int>& path, int lag, int cap);

}  // namespace depsvm
