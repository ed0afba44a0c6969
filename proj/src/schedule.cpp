#include "depsvm/schedule.hpp"

#include <cmath>
#include <stdexcept>

#include "depsvm/mixing.hpp"

namespace depsvm {

double ScheduleSpec::lambda(int n) const {
  if (n < 1) throw std::invalid_argument("schedule: n must be >= 1");
  return c * std::pow(static_cast<double>(n), -gamma);
}

double b_lambda(double k_sup, double c_loss, double lambda) {
  if (k_sup <= 0.0 || c_loss < 0.0 || lambda <= 0.0)
    throw std::invalid_argument("b_lambda: inputs must be positive");
  return k_sup * std::sqrt(c_loss / lambda);
}

Verdict validate_classification(const ScheduleSpec& s, const LossSpec& loss,
                                const KernelSpec& kernel, double alpha) {
  (void)kernel;  // bounded kernels only rescale the constant, not the exponent
  if (alpha <= 0.0 || alpha > 1.0)
    throw std::invalid_argument("validate_classification: alpha must lie in (0,1]");
  if (std::isinf(loss.sup_at_zero()))
    throw std::invalid_argument(
        "validate_classification: loss has unbounded sup at zero");
  if (std::isinf(loss.local_lipschitz(1.0)))
    throw std::invalid_argument(
        "validate_classification: loss is not locally Lipschitz");

  Verdict v;
  if (s.c <= 0.0) throw std::invalid_argument("schedule: c must be > 0");
  const double g = static_cast<double>(loss.lip_growth());
  v.limiting_exponent = alpha - 2.0 * s.gamma * (1.0 + g);
  if (s.gamma <= 0.0) {
    v.valid = false;
    v.binding_condition = "lambda_n must be a null sequence (gamma > 0)";
  } else if (v.limiting_exponent <= 0.0) {
    v.valid = false;
    v.binding_condition = "lambda_n^(2+2g) n^alpha must diverge (exponent > 0)";
  } else {
    v.valid = true;
    v.binding_condition = "ok";
  }
  return v;
}

Verdict validate_regression(const ScheduleSpec& s, double p, double alpha, double beta) {
  if (p < 1.0 || p > 2.0)
    throw std::invalid_argument("validate_regression: p must lie in [1,2]");
  if (alpha <= 0.0 || alpha > 1.0 || beta <= 0.0 || beta > 1.0)
    throw std::invalid_argument("validate_regression: alpha, beta must lie in (0,1]");
  if (s.c <= 0.0) throw std::invalid_argument("schedule: c must be > 0");

  Verdict v;
  const double margin_mean = 2.0 * alpha - p * s.gamma;     // lambda_n^p n^(2 alpha)
  const double margin_var = beta - 2.0 * p * s.gamma;       // lambda_n^(2p) n^beta
  v.limiting_exponent = std::min(margin_mean, margin_var);
  if (s.gamma <= 0.0) {
    v.valid = false;
    v.binding_condition = "lambda_n must be a null sequence (gamma > 0)";
  } else if (margin_mean <= 0.0) {
    v.valid = false;
    v.binding_condition = "lambda_n^p n^(2 alpha) must diverge";
  } else if (margin_var <= 0.0) {
    v.valid = false;
    v.binding_condition = "lambda_n^(2p) n^beta must diverge";
  } else {
    v.valid = true;
    v.binding_condition = "ok";
  }
  return v;
}

namespace {

// least squares fit of log y = b - e log n; returns (e, rms residual)
std::pair<double, double> fit_decay(const std::vector<double>& ns,
                                    const std::vector<double>& ys) {
  const std::size_t k = ns.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double x = std::log(ns[i]);
    const double y = std::log(ys[i]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  const double denom = k * sxx - sx * sx;
  const double slope = (k * sxy - sx * sy) / denom;
  const double inter = (sy - slope * sx) / k;
  double rss = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double r = std::log(ys[i]) - (inter + slope * std::log(ns[i]));
    rss += r * r;
  }
  return {-slope, std::sqrt(rss / k)};
}

}  // namespace

MixingExponents mixing_exponent_from_chain(const MarkovChainSpec& chain,
                                           const std::vector<int>& n_grid) {
  if (n_grid.size() < 2)
    throw std::invalid_argument("mixing_exponent_from_chain: need at least 2 grid points");
  MixingExponents out;

  const Eigen::VectorXd pi = cesaro_limit(chain);
  std::vector<double> ns, devs;
  for (int n : n_grid) {
    const Eigen::VectorXd avg = cesaro_average(chain, n);
    const double d = (avg - pi).cwiseAbs().maxCoeff();
    if (d > 1e-15) {
      ns.push_back(n);
      devs.push_back(d);
    }
  }
  if (ns.size() < 2) {
    out.stationary = true;
    out.alpha_fit = 1.0;  // identically distributed marginals: any rate holds
  } else {
    std::tie(out.alpha_fit, out.alpha_residual) = fit_decay(ns, devs);
  }

  std::vector<double> ns2, avgs;
  for (int n : n_grid) {
    const double a = bi_mixing_average(chain, n, MixCoefficient::Alpha);
    if (a > 1e-15) {
      ns2.push_back(n);
      avgs.push_back(a);
    }
  }
  if (ns2.size() < 2) {
    out.independent = true;
    out.beta_fit = 1.0;
  } else {
    std::tie(out.beta_fit, out.beta_residual) = fit_decay(ns2, avgs);
  }
  return out;
}

}  // namespace depsvm
