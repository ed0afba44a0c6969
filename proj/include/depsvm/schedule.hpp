#pragma once

#include <string>
#include <vector>

#include "depsvm/kernel.hpp"
#include "depsvm/loss.hpp"
#include "depsvm/process.hpp"

namespace depsvm {

/// Regularization sequence lambda_n = c * n^(-gamma).
struct ScheduleSpec {
  double c = 1.0;
  double gamma = 0.25;
  double lambda(int n) const;
};

struct Verdict {
  bool valid = false;
  double limiting_exponent = 0.0;
  std::string binding_condition;
};

/// B_lambda = k_sup * sqrt(c_loss / lambda), the a-priori sup-norm radius of
/// any solution at regularization lambda.
double b_lambda(double k_sup, double c_loss, double lambda);

/// Classification-side schedule check. The required limit reduces, for a
/// loss whose local Lipschitz constant grows like B^g, to
/// lambda_n^(2+2g) n^alpha -> infinity, i.e. the limiting exponent is
/// alpha - 2 gamma (1 + g). Valid iff gamma > 0 and the exponent is > 0.
Verdict validate_classification(const ScheduleSpec& s, const LossSpec& loss,
                                const KernelSpec& kernel, double alpha);

/// Regression-side schedule check for distance losses of growth p in [1,2]:
/// valid iff gamma > 0, 2 alpha - p gamma > 0 and beta - 2 p gamma > 0;
/// the limiting exponent is the smaller margin.
Verdict validate_regression(const ScheduleSpec& s, double p, double alpha, double beta);

struct MixingExponents {
  double alpha_fit = 0.0;      // decay exponent of the mean-marginal deviation
  double alpha_residual = 0.0;
  double beta_fit = 0.0;       // decay exponent of the bi-mixing average
  double beta_residual = 0.0;
  bool stationary = false;     // deviation identically zero; alpha capped at 1
  bool independent = false;    // bi-mixing average identically zero; beta capped at 1
};

/// Fits the polynomial decay exponents of |(1/n) sum E f(Z_i) - E_P f| (over
/// state indicators, exact matrix powers) and of the bi-mixing average by
/// log-log least squares over the grid.
MixingExponents mixing_exponent_from_chain(const MarkovChainSpec& chain,
                                           const std::vector<int>& n_grid);

}  // namespace depsvm
