#pragma once

#include <optional>
#include <string>

namespace depsvm {

enum class LossKind {
  Hinge,
  SquaredHinge,
  LogisticMargin,
  LeastSquares,
  AbsoluteDistance,
  EpsilonInsensitive,
  Huber,
};

enum class LossFamily { MarginBased, DistanceBased };

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Upper/lower growth envelopes of a distance-based loss:
//   psi(r) <= c_upper * (|r|^p_upper + 1)   and   psi(r) >= c_lower * (|r|^p_lower - 1)
struct GrowthConstants {
  double p_upper;
  double c_upper;
  double p_lower;
  double c_lower;
};

/// A convex supervised loss L(y, t) together with the analytic constants the
/// rest of the toolkit consumes: local Lipschitz constants |L|_{a,1}, growth
/// envelopes, and sup_y L(y, 0).
///
/// Margin-based kinds evaluate as phi(y*t) on labels y in {-1, +1};
/// distance-based kinds evaluate as psi(y - t). Unbounded suprema are
/// reported as +infinity, never as a sentinel value.
class LossSpec {
 public:
  static LossSpec hinge();
  static LossSpec squared_hinge();
  static LossSpec logistic();
  static LossSpec least_squares(std::optional<Interval> y_range = {});
  static LossSpec absolute(std::optional<Interval> y_range = {});
  static LossSpec eps_insensitive(double epsilon, std::optional<Interval> y_range = {});
  static LossSpec huber(double delta, std::optional<Interval> y_range = {});

  // config identifiers: hinge, squared_hinge, logistic, least_squares,
  // absolute, eps_insensitive, huber
  static LossSpec from_name(const std::string& name, double param = 0.0,
                            std::optional<Interval> y_range = {});

  LossKind kind() const { return kind_; }
  LossFamily family() const;
  const std::optional<Interval>& y_range() const { return y_range_; }
  // epsilon for EpsilonInsensitive, delta for Huber, 0 otherwise
  double param() const { return param_; }
  std::string name() const;

  double eval(double y, double t) const;

  /// Subdifferential of t -> L(y, t); a singleton interval where the loss is
  /// differentiable.
  Interval subgradient(double y, double t) const;

  /// |L|_{a,1}: Lipschitz constant of t -> L(y, t) on [-a, a], uniform over
  /// the label range. +infinity when the label range makes the sup infinite.
  double local_lipschitz(double a) const;

  GrowthConstants growth_constants() const;  // distance-based only

  /// sup_y L(y, 0); may be +infinity for unbounded label ranges.
  double sup_at_zero() const;

  /// Polynomial growth order of |L|_{B,1} in B: 0 for globally Lipschitz
  /// kinds, 1 where the constant grows linearly (least squares, squared
  /// hinge). Drives the schedule validity exponents.
  int lip_growth() const;

  bool is_smooth() const;            // continuously differentiable in t
  bool is_piecewise_linear() const;  // hinge / absolute / eps-insensitive
  /// Upper bound on L'' where the loss is twice differentiable (smooth kinds).
  double curvature_bound() const;

 private:
  LossSpec(LossKind kind, double param, std::optional<Interval> y_range);

  double y_abs_max() const;  // sup |y| over the label range, may be +inf

  LossKind kind_;
  double param_ = 0.0;
  std::optional<Interval> y_range_;
};

}  // namespace depsvm
