#include "depsvm/kernel.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

namespace depsvm {

KernelSpec KernelSpec::gaussian(double sigma, int input_dim) {
  if (sigma <= 0.0) throw std::invalid_argument("gaussian kernel: sigma must be > 0");
  if (input_dim < 1) throw std::invalid_argument("kernel: input_dim must be >= 1");
  KernelSpec k(KernelKind::Gaussian, input_dim);
  k.sigma_ = sigma;
  return k;
}

KernelSpec KernelSpec::linear(int input_dim) {
  if (input_dim < 1) throw std::invalid_argument("kernel: input_dim must be >= 1");
  return KernelSpec(KernelKind::Linear, input_dim);
}

KernelSpec KernelSpec::polynomial(int degree, double offset, int input_dim) {
  if (degree < 1) throw std::invalid_argument("polynomial kernel: degree must be >= 1");
  if (offset < 0.0) throw std::invalid_argument("polynomial kernel: offset must be >= 0");
  if (input_dim < 1) throw std::invalid_argument("kernel: input_dim must be >= 1");
  KernelSpec k(KernelKind::Polynomial, input_dim);
  k.degree_ = degree;
  k.offset_ = offset;
  return k;
}

KernelSpec KernelSpec::from_name(const std::string& name, int input_dim, double sigma,
                                 int degree, double offset) {
  if (name == "gaussian") return gaussian(sigma, input_dim);
  if (name == "linear") return linear(input_dim);
  if (name == "polynomial") return polynomial(degree, offset, input_dim);
  throw std::invalid_argument("unknown kernel kind: " + name);
}

std::string KernelSpec::name() const {
  switch (kind_) {
    case KernelKind::Gaussian: return "gaussian";
    case KernelKind::Linear: return "linear";
    case KernelKind::Polynomial: return "polynomial";
  }
  return "?";
}

bool KernelSpec::operator==(const KernelSpec& o) const {
  return kind_ == o.kind_ && input_dim_ == o.input_dim_ && sigma_ == o.sigma_ &&
         degree_ == o.degree_ && offset_ == o.offset_;
}

double KernelSpec::eval(const Eigen::VectorXd& x, const Eigen::VectorXd& xp) const {
  if (x.size() != input_dim_ || xp.size() != input_dim_)
    throw std::invalid_argument("kernel eval: dimension mismatch");
  switch (kind_) {
    case KernelKind::Gaussian:
      return std::exp(-sigma_ * sigma_ * (x - xp).squaredNorm());
    case KernelKind::Linear:
      return x.dot(xp);
    case KernelKind::Polynomial:
      return std::pow(x.dot(xp) + offset_, degree_);
  }
  return 0.0;
}

double KernelSpec::sup_norm(std::optional<double> domain_bound) const {
  switch (kind_) {
    case KernelKind::Gaussian:
      return 1.0;
    case KernelKind::Linear:
      if (!domain_bound)
        throw std::invalid_argument("sup_norm: linear kernel needs a domain bound");
      return *domain_bound;
    case KernelKind::Polynomial: {
      if (!domain_bound)
        throw std::invalid_argument("sup_norm: polynomial kernel needs a domain bound");
      const double r2 = (*domain_bound) * (*domain_bound);
      return std::pow(r2 + offset_, 0.5 * degree_);
    }
  }
  return 0.0;
}

Eigen::MatrixXd KernelSpec::gram(const Eigen::MatrixXd& pts) const {
  return cross_gram(pts, pts);
}

Eigen::MatrixXd KernelSpec::cross_gram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) const {
  if (a.cols() != input_dim_ || b.cols() != input_dim_)
    throw std::invalid_argument("cross_gram: dimension mismatch");
  Eigen::MatrixXd dots = a * b.transpose();
  switch (kind_) {
    case KernelKind::Gaussian: {
      const Eigen::VectorXd na = a.rowwise().squaredNorm();
      const Eigen::VectorXd nb = b.rowwise().squaredNorm();
      const double s2 = sigma_ * sigma_;
      Eigen::MatrixXd out(a.rows(), b.rows());
      for (Eigen::Index j = 0; j < b.rows(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
          const double d2 = std::max(0.0, na(i) + nb(j) - 2.0 * dots(i, j));
          out(i, j) = std::exp(-s2 * d2);
        }
      return out;
    }
    case KernelKind::Linear:
      return dots;
    case KernelKind::Polynomial: {
      Eigen::MatrixXd out = dots.array() + offset_;
      return out.array().pow(static_cast<double>(degree_)).matrix();
    }
  }
  return dots;
}

double RkhsFunction::eval(const Eigen::VectorXd& x) const {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    acc += coeffs(i) * kernel.eval(points.row(i), x);
  return acc;
}

Eigen::VectorXd RkhsFunction::eval_many(const Eigen::MatrixXd& xs) const {
  if (points.rows() == 0) return Eigen::VectorXd::Zero(xs.rows());
  // chunked so large query sets never materialize a full cross-Gram
  constexpr Eigen::Index chunk = 1024;
  Eigen::VectorXd out(xs.rows());
  for (Eigen::Index start = 0; start < xs.rows(); start += chunk) {
    const Eigen::Index rows = std::min(chunk, xs.rows() - start);
    out.segment(start, rows) = kernel.cross_gram(xs.middleRows(start, rows), points) * coeffs;
  }
  return out;
}

RkhsFunction zero_function(const KernelSpec& kernel) {
  return RkhsFunction{kernel, Eigen::MatrixXd(0, kernel.input_dim()), Eigen::VectorXd(0)};
}

double rkhs_norm(const RkhsFunction& f) {
  if (f.points.rows() == 0) return 0.0;
  const Eigen::MatrixXd k = f.kernel.gram(f.points);
  const double sq = f.coeffs.dot(k * f.coeffs);
  return std::sqrt(std::max(0.0, sq));
}

double rkhs_diff_norm(const RkhsFunction& f, const RkhsFunction& g) {
  if (f.kernel != g.kernel)
    throw std::invalid_argument("rkhs_diff_norm: kernel mismatch");
  const int d = f.kernel.input_dim();

  // merge expansions, deduplicating exactly equal points
  std::map<std::vector<double>, double> merged;
  auto add = [&](const Eigen::MatrixXd& pts, const Eigen::VectorXd& c, double sign) {
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      std::vector<double> key(static_cast<std::size_t>(d));
      for (int j = 0; j < d; ++j) key[static_cast<std::size_t>(j)] = pts(i, j);
      merged[key] += sign * c(i);
    }
  };
  add(f.points, f.coeffs, 1.0);
  add(g.points, g.coeffs, -1.0);

  const auto m = static_cast<Eigen::Index>(merged.size());
  Eigen::MatrixXd pts(m, d);
  Eigen::VectorXd w(m);
  Eigen::Index r = 0;
  for (const auto& [key, coeff] : merged) {
    for (int j = 0; j < d; ++j) pts(r, j) = key[static_cast<std::size_t>(j)];
    w(r) = coeff;
    ++r;
  }
  if (m == 0) return 0.0;
  const Eigen::MatrixXd k = f.kernel.gram(pts);
  return std::sqrt(std::max(0.0, w.dot(k * w)));
}

}  // namespace depsvm
