#include "depsvm/harness.hpp"

#include <atomic>
#include <functional>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "depsvm/rng.hpp"

namespace depsvm {

namespace {

// derived sub-seeds; the salts keep path/risk/reference streams apart
constexpr std::uint64_t kPathSalt = 0x9a7e;
constexpr std::uint64_t kRiskSalt = 0x417;
constexpr std::uint64_t kRefSalt = 0x4ef5;

std::uint64_t cell_seed(std::uint64_t seed, int n, std::uint64_t salt) {
  return mix_seed(mix_seed(seed, static_cast<std::uint64_t>(n)), salt);
}

void run_cells(int count, int jobs, const std::function<void(int)>& work) {
  if (jobs <= 1) {
    for (int i = 0; i < count; ++i) work(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  const int threads = std::min(jobs, count);
  pool.reserve(static_cast<std::size_t>(threads));
  for (int tidx = 0; tidx < threads; ++tidx) {
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) work(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

void validate_config(const ExperimentConfig& cfg) {
  cfg.process.validate();
  if (cfg.n_grid.empty()) throw std::invalid_argument("experiment.n_grid: empty");
  for (std::size_t i = 1; i < cfg.n_grid.size(); ++i)
    if (cfg.n_grid[i] <= cfg.n_grid[i - 1])
      throw std::invalid_argument("experiment.n_grid: must be strictly ascending");
  if (cfg.n_grid.front() < 1)
    throw std::invalid_argument("experiment.n_grid: entries must be >= 1");
  if (cfg.seeds.empty()) throw std::invalid_argument("experiment.seeds: empty");
  if (cfg.test_m < 1000)
    throw std::invalid_argument("experiment.test_m: must be >= 1000");
  if (cfg.ref_m_factor < 1)
    throw std::invalid_argument("experiment.ref_m_factor: must be >= 1");
  if (cfg.tol <= 0.0) throw std::invalid_argument("experiment.tol: must be > 0");
  if (cfg.schedule.c <= 0.0) throw std::invalid_argument("schedule.c: must be > 0");
  if (cfg.schedule.gamma < 0.0)
    throw std::invalid_argument("schedule.gamma: must be >= 0");
  if (cfg.kernel.input_dim() != cfg.process.input_dim())
    throw std::invalid_argument("kernel.input_dim: mismatch with the process");

  const bool classification = cfg.process.classification();
  if (cfg.loss.family() == LossFamily::MarginBased && !classification)
    throw std::invalid_argument("loss: margin-based loss needs a classification label model");
  if (!classification) {
    const auto& reg = std::get<RegressionLabel>(cfg.process.label());
    const double p = cfg.loss.growth_constants().p_upper;
    if (p > reg.noise.q)
      throw std::invalid_argument(
          "process.label.q: loss growth order exceeds the declared moment order");
  }
}

Verdict schedule_verdict(const ExperimentConfig& cfg) {
  if (cfg.process.classification())
    return validate_classification(cfg.schedule, cfg.loss, cfg.kernel, cfg.mixing_alpha);
  const double p = cfg.loss.growth_constants().p_upper;
  return validate_regression(cfg.schedule, p, cfg.mixing_alpha, cfg.mixing_beta);
}

RiskEstimate estimate_risk(const RkhsFunction& f, const ProcessSpec& spec,
                           const LossSpec& loss, int m, std::uint64_t seed) {
  if (spec.finite_classification()) {
    const auto* mc = spec.chain();
    const auto& c = std::get<ClassificationLabel>(spec.label());
    const Eigen::VectorXd pi = cesaro_limit(*mc);
    double acc = 0.0;
    for (int s = 0; s < mc->states(); ++s) {
      const double t = f.eval(mc->features.row(s).transpose());
      const double eta = c.tabular() ? c.eta[static_cast<std::size_t>(s)]
                                     : c.eta_at(mc->features(s, 0));
      acc += pi(s) * (eta * loss.eval(1.0, t) + (1.0 - eta) * loss.eval(-1.0, t));
    }
    return {acc, 0.0, true};
  }
  if (m < 1000) throw std::invalid_argument("estimate_risk: m must be >= 1000");
  const TrainingSet sample = sample_stationary(spec, seed, m);
  const Eigen::VectorXd fv = f.eval_many(sample.xs);
  double mean = 0.0, sq = 0.0;
  for (int i = 0; i < m; ++i) {
    const double v = loss.eval(sample.ys(i), fv(i));
    mean += v;
    sq += v * v;
  }
  mean /= m;
  const double var = std::max(0.0, sq / m - mean * mean);
  return {mean, 1.96 * std::sqrt(var / m), false};
}

ExperimentResult run_consistency(const ExperimentConfig& cfg, int jobs) {
  validate_config(cfg);
  ExperimentResult result;
  result.verdict = schedule_verdict(cfg);
  result.bayes = bayes_risk(cfg.process, cfg.loss);

  struct Cell {
    int n;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (int n : cfg.n_grid)
    for (std::uint64_t s : cfg.seeds) cells.push_back({n, s});
  result.rows.resize(cells.size());

  TrainOptions opts;
  opts.tol = cfg.tol;

  run_cells(static_cast<int>(cells.size()), jobs, [&](int ci) {
    const auto [n, seed] = cells[static_cast<std::size_t>(ci)];
    const double lambda = cfg.schedule.lambda(n);
    const std::uint64_t path_seed = cell_seed(seed, n, kPathSalt);

    // the future window reuses the same path: prefix determinism makes the
    // first n points the training set
    const int window = cfg.test_m;
    const TrainingSet full = sample_path(cfg.process, path_seed, n + window);
    TrainingSet t;
    t.xs = full.xs.topRows(n);
    t.ys = full.ys.head(n);

    const SvmSolution sol = train(t, cfg.loss, cfg.kernel, lambda, opts);
    const RiskEstimate risk =
        estimate_risk(sol.f, cfg.process, cfg.loss, cfg.test_m, cell_seed(seed, n, kRiskSalt));

    const Eigen::VectorXd future = sol.f.eval_many(full.xs.bottomRows(window));
    double future_risk = 0.0;
    for (int i = 0; i < window; ++i)
      future_risk += cfg.loss.eval(full.ys(n + i), future(i));
    future_risk /= window;

    SweepRow row;
    row.n = n;
    row.lambda = lambda;
    row.seed = seed;
    row.train_risk = sol.empirical_risk;
    row.risk_est = risk.value;
    row.risk_ci = risk.half_width;
    row.future_risk = future_risk;
    row.bayes_risk = result.bayes;
    row.excess_risk = risk.value - result.bayes;
    row.f_norm = sol.norm;
    double r0 = 0.0;
    for (int i = 0; i < n; ++i) r0 += cfg.loss.eval(t.ys(i), 0.0);
    row.norm_bound = std::sqrt(r0 / n / lambda);
    row.solver_residual = sol.opt_residual;
    row.iterations = sol.iterations;
    result.rows[static_cast<std::size_t>(ci)] = row;
  });

  for (const SweepRow& row : result.rows)
    if (row.f_norm > row.norm_bound) ++result.norm_violations;
  for (int n : cfg.n_grid) {
    std::vector<double> ex;
    for (const SweepRow& row : result.rows)
      if (row.n == n) ex.push_back(row.excess_risk);
    result.median_excess[n] = median_of(ex);
  }
  return result;
}

StabilityResult run_stability(const ExperimentConfig& cfg, int jobs, double slack) {
  validate_config(cfg);
  StabilityResult result;

  struct Cell {
    int n;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (int n : cfg.n_grid)
    for (std::uint64_t s : cfg.seeds) cells.push_back({n, s});
  result.rows.resize(cells.size());

  TrainOptions opts;
  opts.tol = cfg.tol;

  run_cells(static_cast<int>(cells.size()), jobs, [&](int ci) {
    const auto [n, seed] = cells[static_cast<std::size_t>(ci)];
    const double lambda = cfg.schedule.lambda(n);
    const int m = std::max(1000, cfg.ref_m_factor * n);

    const TrainingSet ref = sample_stationary(cfg.process, cell_seed(seed, n, kRefSalt), m);
    const SvmSolution f_ref = train(ref, cfg.loss, cfg.kernel, lambda, opts);
    const TrainingSet t = sample_path(cfg.process, cell_seed(seed, n, kPathSalt), n);
    const StabilityWitness w =
        stability_witness(f_ref, t, ref, cfg.loss, cfg.kernel, lambda, opts, slack);

    StabilityRow row;
    row.n = n;
    row.seed = seed;
    row.lambda = lambda;
    row.lhs = w.lhs;
    row.rhs = w.rhs;
    row.h_sup = w.h_sup;
    row.h_sup_bound = w.h_sup_bound;
    row.holds = w.holds;
    result.rows[static_cast<std::size_t>(ci)] = row;
  });

  for (const StabilityRow& row : result.rows) {
    if (!row.holds) ++result.violations;
    if (row.h_sup > row.h_sup_bound + 1e-12) ++result.h_violations;
  }
  return result;
}

std::vector<LlnFunctionTable> run_lln(const ExperimentConfig& cfg) {
  validate_config(cfg);
  std::vector<LlnFunctionTable> out;
  if (const auto* mc = cfg.process.chain()) {
    for (int s = 0; s < mc->states(); ++s) {
      const Eigen::VectorXd target = mc->features.row(s).transpose();
      auto indicator = [target](const Eigen::VectorXd& x, double) {
        return (x - target).cwiseAbs().maxCoeff() == 0.0 ? 1.0 : 0.0;
      };
      out.push_back({"state_" + std::to_string(s),
                     lln_diagnostic(cfg.process, indicator, cfg.n_grid, cfg.seeds)});
    }
    return out;
  }
  auto below_zero = [](const Eigen::VectorXd& x, double) { return x(0) < 0.0 ? 1.0 : 0.0; };
  auto cosine = [](const Eigen::VectorXd& x, double) { return std::cos(x(0)); };
  out.push_back({"indicator_x_below_0",
                 lln_diagnostic(cfg.process, below_zero, cfg.n_grid, cfg.seeds)});
  out.push_back({"cos_x", lln_diagnostic(cfg.process, cosine, cfg.n_grid, cfg.seeds)});
  return out;
}

}  // namespace depsvm
