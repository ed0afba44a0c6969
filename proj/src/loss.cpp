#include "depsvm/loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace depsvm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// log(1 + exp(-v)) without overflow
double log1pexp_neg(double v) {
  if (v > 0.0) return std::log1p(std::exp(-v));
  return -v + std::log1p(std::exp(v));
}

// 1 / (1 + exp(v))
double sigmoid_neg(double v) {
  if (v > 0.0) {
    const double e = std::exp(-v);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(v));
}
}  // namespace

LossSpec::LossSpec(LossKind kind, double param, std::optional<Interval> y_range)
    : kind_(kind), param_(param), y_range_(y_range) {
  if (kind_ == LossKind::EpsilonInsensitive && param_ < 0.0)
    throw std::invalid_argument("eps_insensitive: epsilon must be >= 0");
  if (kind_ == LossKind::Huber && param_ <= 0.0)
    throw std::invalid_argument("huber: delta must be > 0");
  if (family() == LossFamily::MarginBased) {
    // margin losses live on Y = {-1, +1}
    y_range_ = Interval{-1.0, 1.0};
  } else if (y_range_ && y_range_->lo > y_range_->hi) {
    throw std::invalid_argument("loss: y_range lower bound exceeds upper bound");
  }
}

LossSpec LossSpec::hinge() { return LossSpec(LossKind::Hinge, 0.0, {}); }
LossSpec LossSpec::squared_hinge() { return LossSpec(LossKind::SquaredHinge, 0.0, {}); }
LossSpec LossSpec::logistic() { return LossSpec(LossKind::LogisticMargin, 0.0, {}); }
LossSpec LossSpec::least_squares(std::optional<Interval> y_range) {
  return LossSpec(LossKind::LeastSquares, 0.0, y_range);
}
LossSpec LossSpec::absolute(std::optional<Interval> y_range) {
  return LossSpec(LossKind::AbsoluteDistance, 0.0, y_range);
}
LossSpec LossSpec::eps_insensitive(double epsilon, std::optional<Interval> y_range) {
  return LossSpec(LossKind::EpsilonInsensitive, epsilon, y_range);
}
LossSpec LossSpec::huber(double delta, std::optional<Interval> y_range) {
  return LossSpec(LossKind::Huber, delta, y_range);
}

LossSpec LossSpec::from_name(const std::string& name, double param,
                             std::optional<Interval> y_range) {
  if (name == "hinge") return hinge();
  if (name == "squared_hinge") return squared_hinge();
  if (name == "logistic") return logistic();
  if (name == "least_squares") return least_squares(y_range);
  if (name == "absolute") return absolute(y_range);
  if (name == "eps_insensitive") return eps_insensitive(param, y_range);
  if (name == "huber") return huber(param, y_range);
  throw std::invalid_argument("unknown loss kind: " + name);
}

std::string LossSpec::name() const {
  switch (kind_) {
    case LossKind::Hinge: return "hinge";
    case LossKind::SquaredHinge: return "squared_hinge";
    case LossKind::LogisticMargin: return "logistic";
    case LossKind::LeastSquares: return "least_squares";
    case LossKind::AbsoluteDistance: return "absolute";
    case LossKind::EpsilonInsensitive: return "eps_insensitive";
    case LossKind::Huber: return "huber";
  }
  return "?";
}

LossFamily LossSpec::family() const {
  switch (kind_) {
    case LossKind::Hinge:
    case LossKind::SquaredHinge:
    case LossKind::LogisticMargin:
      return LossFamily::MarginBased;
    default:
      return LossFamily::DistanceBased;
  }
}

double LossSpec::y_abs_max() const {
  if (!y_range_) return kInf;
  return std::max(std::abs(y_range_->lo), std::abs(y_range_->hi));
}

double LossSpec::eval(double y, double t) const {
  if (family() == LossFamily::MarginBased) {
    if (y != 1.0 && y != -1.0)
      throw std::domain_error("margin loss: label must be -1 or +1");
  } else if (y_range_ && (y < y_range_->lo || y > y_range_->hi)) {
    throw std::domain_error("loss: label outside declared range");
  }
  switch (kind_) {
    case LossKind::Hinge:
      return std::max(0.0, 1.0 - y * t);
    case LossKind::SquaredHinge: {
      const double m = std::max(0.0, 1.0 - y * t);
      return m * m;
    }
    case LossKind::LogisticMargin:
      return log1pexp_neg(y * t);
    case LossKind::LeastSquares: {
      const double r = y - t;
      return r * r;
    }
    case LossKind::AbsoluteDistance:
      return std::abs(y - t);
    case LossKind::EpsilonInsensitive:
      return std::max(0.0, std::abs(y - t) - param_);
    case LossKind::Huber: {
      const double r = std::abs(y - t);
      if (r <= param_) return 0.5 * r * r;
      return param_ * r - 0.5 * param_ * param_;
    }
  }
  return 0.0;
}

Interval LossSpec::subgradient(double y, double t) const {
  switch (kind_) {
    case LossKind::Hinge: {
      const double v = y * t;
      if (v < 1.0) return {-y, -y};
      if (v > 1.0) return {0.0, 0.0};
      return {std::min(-y, 0.0), std::max(-y, 0.0)};
    }
    case LossKind::SquaredHinge: {
      const double g = -2.0 * y * std::max(0.0, 1.0 - y * t);
      return {g, g};
    }
    case LossKind::LogisticMargin: {
      const double g = -y * sigmoid_neg(y * t);
      return {g, g};
    }
    case LossKind::LeastSquares: {
      const double g = 2.0 * (t - y);
      return {g, g};
    }
    case LossKind::AbsoluteDistance: {
      if (t > y) return {1.0, 1.0};
      if (t < y) return {-1.0, -1.0};
      return {-1.0, 1.0};
    }
    case LossKind::EpsilonInsensitive: {
      const double r = y - t;  // loss = max(0, |r| - eps)
      if (param_ == 0.0) {
        if (t > y) return {1.0, 1.0};
        if (t < y) return {-1.0, -1.0};
        return {-1.0, 1.0};
      }
      if (r > param_) return {-1.0, -1.0};
      if (r < -param_) return {1.0, 1.0};
      if (r == param_) return {-1.0, 0.0};
      if (r == -param_) return {0.0, 1.0};
      return {0.0, 0.0};
    }
    case LossKind::Huber: {
      const double g = -std::clamp(y - t, -param_, param_);
      return {g, g};
    }
  }
  return {0.0, 0.0};
}

double LossSpec::local_lipschitz(double a) const {
  if (a <= 0.0) throw std::invalid_argument("local_lipschitz: a must be > 0");
  const double ymax = y_abs_max();
  switch (kind_) {
    case LossKind::Hinge:
      return 1.0;
    case LossKind::SquaredHinge:
      return 2.0 * (1.0 + a);
    case LossKind::LogisticMargin:
      // sup over |t| <= a of sigma(-y t) with y = +-1
      return std::isinf(a) ? 1.0 : 1.0 / (1.0 + std::exp(-a));
    case LossKind::LeastSquares:
      return std::isinf(ymax) ? kInf : 2.0 * (a + ymax);
    case LossKind::AbsoluteDistance:
      return 1.0;
    case LossKind::EpsilonInsensitive:
      // slope 1 is attained iff some (y, t) in range has |y - t| > eps
      return (ymax + a > param_) ? 1.0 : 0.0;
    case LossKind::Huber:
      return std::min(param_, ymax + a);
  }
  return 0.0;
}

GrowthConstants LossSpec::growth_constants() const {
  if (family() == LossFamily::MarginBased)
    throw std::domain_error("growth_constants: loss is margin-based");
  switch (kind_) {
    case LossKind::LeastSquares:
      return {2.0, 1.0, 2.0, 1.0};
    case LossKind::AbsoluteDistance:
      return {1.0, 1.0, 1.0, 1.0};
    case LossKind::EpsilonInsensitive:
      // psi(r) >= c(|r| - 1) fails for every c > 0 once eps >= 1
      // (psi vanishes at |r| = eps where the lower envelope is positive)
      if (param_ >= 1.0)
        throw std::domain_error(
            "growth_constants: eps_insensitive with epsilon >= 1 has no "
            "lower growth envelope of the required form");
      return {1.0, 1.0, 1.0, 1.0};
    case LossKind::Huber:
      return {1.0, param_, 1.0, std::min(param_, 2.0)};
    default:
      break;
  }
  throw std::logic_error("growth_constants: unhandled kind");
}

double LossSpec::sup_at_zero() const {
  const double ymax = y_abs_max();
  switch (kind_) {
    case LossKind::Hinge:
      return 1.0;
    case LossKind::SquaredHinge:
      return 1.0;
    case LossKind::LogisticMargin:
      return std::log(2.0);
    case LossKind::LeastSquares:
      return std::isinf(ymax) ? kInf : ymax * ymax;
    case LossKind::AbsoluteDistance:
      return ymax;
    case LossKind::EpsilonInsensitive:
      return std::isinf(ymax) ? kInf : std::max(0.0, ymax - param_);
    case LossKind::Huber: {
      if (std::isinf(ymax)) return kInf;
      if (ymax <= param_) return 0.5 * ymax * ymax;
      return param_ * ymax - 0.5 * param_ * param_;
    }
  }
  return 0.0;
}

int LossSpec::lip_growth() const {
  switch (kind_) {
    case LossKind::SquaredHinge:
    case LossKind::LeastSquares:
      return 1;
    default:
      return 0;
  }
}

bool LossSpec::is_smooth() const {
  switch (kind_) {
    case LossKind::SquaredHinge:
    case LossKind::LogisticMargin:
    case LossKind::LeastSquares:
    case LossKind::Huber:
      return true;
    default:
      return false;
  }
}

bool LossSpec::is_piecewise_linear() const {
  switch (kind_) {
    case LossKind::Hinge:
    case LossKind::AbsoluteDistance:
    case LossKind::EpsilonInsensitive:
      return true;
    default:
      return false;
  }
}

double LossSpec::curvature_bound() const {
  switch (kind_) {
    case LossKind::SquaredHinge: return 2.0;
    case LossKind::LogisticMargin: return 0.25;
    case LossKind::LeastSquares: return 2.0;
    case LossKind::Huber: return 1.0;
    default: return kInf;
  }
}

}  // namespace depsvm
