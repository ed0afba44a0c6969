#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

namespace depsvm {

enum class KernelKind { Gaussian, Linear, Polynomial };

/// Positive semi-definite kernel on R^d. The Gaussian kernel is
/// exp(-sigma^2 ||x - x'||^2); Linear and Polynomial are unbounded and only
/// admit a sup norm over a bounded domain.
class KernelSpec {
 public:
  KernelSpec() : KernelSpec(KernelKind::Gaussian, 1) {}  // gaussian(1, 1)

  static KernelSpec gaussian(double sigma, int input_dim);
  static KernelSpec linear(int input_dim);
  static KernelSpec polynomial(int degree, double offset, int input_dim);
  static KernelSpec from_name(const std::string& name, int input_dim,
                              double sigma = 1.0, int degree = 2, double offset = 1.0);

  double eval(const Eigen::VectorXd& x, const Eigen::VectorXd& xp) const;

  /// sup_x sqrt(k(x, x)); Linear/Polynomial require a bound on ||x||.
  double sup_norm(std::optional<double> domain_bound = {}) const;

  /// Gram matrix of the rows of pts.
  Eigen::MatrixXd gram(const Eigen::MatrixXd& pts) const;
  /// Cross-Gram K[i][j] = k(a_i, b_j) for rows of a and b.
  Eigen::MatrixXd cross_gram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) const;

  KernelKind kind() const { return kind_; }
  int input_dim() const { return input_dim_; }
  double sigma() const { return sigma_; }
  int degree() const { return degree_; }
  double offset() const { return offset_; }
  std::string name() const;

  bool operator==(const KernelSpec& o) const;
  bool operator!=(const KernelSpec& o) const { return !(*this == o); }

 private:
  KernelSpec(KernelKind kind, int input_dim) : kind_(kind), input_dim_(input_dim) {}

  KernelKind kind_;
  int input_dim_;
  double sigma_ = 1.0;
  int degree_ = 1;
  double offset_ = 0.0;
};

/// Finite kernel expansion f = sum_i coeffs[i] * k(points.row(i), .), the
/// representation of an RKHS element used throughout.
struct RkhsFunction {
  KernelSpec kernel;
  Eigen::MatrixXd points;  // m x d
  Eigen::VectorXd coeffs;  // m

  double eval(const Eigen::VectorXd& x) const;
  Eigen::VectorXd eval_many(const Eigen::MatrixXd& xs) const;
};

RkhsFunction zero_function(const KernelSpec& kernel);

double rkhs_norm(const RkhsFunction& f);

/// ||f - g||_H computed on the union expansion. Identical points are merged
/// by exact coordinate equality. Throws on kernel mismatch.
double rkhs_diff_norm(const RkhsFunction& f, const RkhsFunction& g);

}  // namespace depsvm
