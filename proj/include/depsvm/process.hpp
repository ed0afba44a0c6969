#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "depsvm/loss.hpp"

namespace depsvm {

struct TrainingSet {
  Eigen::MatrixXd xs;  // n x d
  Eigen::VectorXd ys;  // n
  int n() const { return static_cast<int>(ys.size()); }
};

// ---------------------------------------------------------------------------
// label models
// ---------------------------------------------------------------------------

/// P(y = +1 | latent value). Finite-state processes use the per-state table;
/// continuous ones use a two-level threshold profile eta(x) = p_left for
/// x < threshold, p_right otherwise.
struct ClassificationLabel {
  std::vector<double> eta;  // tabular when non-empty
  double p_left = 0.5;
  double p_right = 0.5;
  double threshold = 0.0;
  bool tabular() const { return !eta.empty(); }
  double eta_at(double x) const { return x < threshold ? p_left : p_right; }
};

struct MeanFunction {
  enum class Kind { Zero, Linear, Sine, Tanh };
  Kind kind = Kind::Zero;
  double a = 1.0;  // amplitude
  double b = 1.0;  // frequency / slope
  double operator()(double x) const;
  static MeanFunction from_name(const std::string& name, double a, double b);
  std::string name() const;
};

struct NoiseSpec {
  enum class Kind { Gaussian, StudentT };
  Kind kind = Kind::Gaussian;
  double scale = 1.0;
  int dof = 5;     // StudentT only
  double q = 2.0;  // declared finite moment order
  double variance() const;
  std::string name() const;
};

struct RegressionLabel {
  MeanFunction mean;
  NoiseSpec noise;
};

using LabelModel = std::variant<ClassificationLabel, RegressionLabel>;

// ---------------------------------------------------------------------------
// process variants
// ---------------------------------------------------------------------------

struct UniformBox {
  Eigen::VectorXd lo, hi;
};
struct GaussianMixture1d {
  std::vector<double> weights, means, sds;
};
using XDist = std::variant<UniformBox, GaussianMixture1d>;

struct IidSpec {
  XDist x_dist;
  LabelModel label;
};

struct MarkovChainSpec {
  Eigen::MatrixXd trans;     // m x m row-stochastic
  Eigen::VectorXd init;      // m
  Eigen::MatrixXd features;  // m x d state feature map
  LabelModel label;
  int states() const { return static_cast<int>(trans.rows()); }
};

struct Ar1Spec {
  double rho = 0.0;
  double noise_sd = 1.0;
  LabelModel label;
};

/// Hidden doubling map z_{i+1} = 2 z_i mod 1 observed through additive noise
/// x_i = z_i + eps_i. The orbit is kept as a 64-bit window over an i.i.d.
/// bit stream, so it does not collapse the way float iteration does.
struct NoisyDoublingSpec {
  double noise_sd = 0.1;
  LabelModel label;
};

struct ProcessSpec {
  std::variant<IidSpec, MarkovChainSpec, Ar1Spec, NoisyDoublingSpec> variant;

  int input_dim() const;
  const LabelModel& label() const;
  const MarkovChainSpec* chain() const;
  bool classification() const;
  /// finite-state chain with a tabular label model: risks are closed-form
  bool finite_classification() const;
  void validate() const;  // throws std::invalid_argument naming the field
  std::string name() const;
};

/// Descriptor of the stationary mean P (the Cesaro limit of the marginals).
struct StationaryMean {
  enum class Form { FiniteStates, IidLaw, GaussianMarginal, UniformWithNoise };
  Form form;
  Eigen::VectorXd pi;    // FiniteStates
  double mean = 0.0;     // GaussianMarginal
  double sd = 0.0;       // GaussianMarginal
  double noise_sd = 0.0; // UniformWithNoise
};

// ---------------------------------------------------------------------------
// operations
// ---------------------------------------------------------------------------

/// One dependent path of length n. Deterministic in (seed, n) and
/// prefix-consistent: the path for n is a prefix of the path for n+1.
TrainingSet sample_path(const ProcessSpec& spec, std::uint64_t seed, int n);

StationaryMean stationary_mean(const ProcessSpec& spec);

/// i.i.d. draws from the stationary mean.
TrainingSet sample_stationary(const ProcessSpec& spec, std::uint64_t seed, int m);

/// Bayes risk under the stationary mean: per-x inner-risk minimization,
/// closed form where available, adaptive quadrature otherwise.
double bayes_risk(const ProcessSpec& spec, const LossSpec& loss);

/// Minimal inner risk inf_t (eta L(1,t) + (1-eta) L(-1,t)) for labels +-1.
double inner_bayes_risk(const LossSpec& loss, double eta);

/// E psi(noise) for a symmetric noise law: the irreducible regression risk.
double irreducible_regression_risk(const LossSpec& loss, const NoiseSpec& noise);

/// Exact (1/n) sum_{i=1..n} nu T^{i-1} by matrix powers.
Eigen::VectorXd cesaro_average(const MarkovChainSpec& chain, int n);
/// Exact Cesaro limit, correct for periodic chains.
Eigen::VectorXd cesaro_limit(const MarkovChainSpec& chain);
/// Strict positivity of some power trans^k, k <= cap (ergodicity check used
/// by the config validator; finite chains always satisfy the weaker
/// minorization condition).
bool has_positive_power(const MarkovChainSpec& chain, int cap);

/// E_P f for bounded f(x, y): exact for finite-state labels, Monte Carlo on
/// the stationary mean otherwise.
double stationary_expectation(const ProcessSpec& spec,
                              const std::function<double(const Eigen::VectorXd&, double)>& f);

struct LlnRow {
  int n = 0;
  std::uint64_t seed = 0;
  double deviation = 0.0;
};
struct LlnTable {
  std::vector<LlnRow> rows;  // ordered by (n, seed)
  std::vector<int> n_grid;
  std::vector<double> median_by_n;
  double expectation = 0.0;
};

/// Deviations |(1/n) sum f(Z_i) - E_P f| along one path per seed, evaluated
/// at every n in the grid (prefix averages of a single path).
LlnTable lln_diagnostic(const ProcessSpec& spec,
                        const std::function<double(const Eigen::VectorXd&, double)>& f,
                        const std::vector<int>& n_grid,
                        const std::vector<std::uint64_t>& seeds,
                        std::optional<double> expectation = {});

double median_of(std::vector<double> v);

}  // namespace depsvm
