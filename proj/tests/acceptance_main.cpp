// Acceptance suite: every criterion prints one PASS/FAIL line and the binary
// exits nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "depsvm/csvio.hpp"
#include "depsvm/harness.hpp"
#include "depsvm/mixing.hpp"
#include "depsvm/rng.hpp"
#include "depsvm/schedule.hpp"
#include "depsvm/solver.hpp"

using namespace depsvm;

namespace {

int g_failures = 0;

class Criterion {
 public:
  Criterion(int id, std::string label)
      : id_(id), label_(std::move(label)), start_(std::chrono::steady_clock::now()) {}

  void check(bool ok, const std::string& detail) {
    if (!ok) {
      pass_ = false;
      if (!first_failure_.empty()) first_failure_ += "; ";
      first_failure_ += detail;
    }
  }

  void note(const std::string& text) { notes_ = text; }

  ~Criterion() {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    std::printf("C%-2d %s  %s (%.1fs)%s%s\n", id_, pass_ ? "PASS" : "FAIL",
                label_.c_str(), secs, notes_.empty() ? "" : (" " + notes_).c_str(),
                first_failure_.empty() ? "" : ("  [" + first_failure_ + "]").c_str());
    if (!pass_) ++g_failures;
  }

 private:
  int id_;
  std::string label_;
  std::string notes_;
  std::string first_failure_;
  bool pass_ = true;
  std::chrono::steady_clock::time_point start_;
};

MarkovChainSpec chain2(double stay, double init0, std::vector<double> eta) {
  MarkovChainSpec mc;
  mc.trans.resize(2, 2);
  mc.trans << stay, 1.0 - stay, 1.0 - stay, stay;
  mc.init.resize(2);
  mc.init << init0, 1.0 - init0;
  mc.features.resize(2, 1);
  mc.features << -1.0, 1.0;
  ClassificationLabel lbl;
  lbl.eta = std::move(eta);
  mc.label = lbl;
  return mc;
}

ExperimentConfig reference_chain_config() {
  ExperimentConfig cfg;
  cfg.name = "acceptance-chain";
  cfg.process.variant = chain2(0.9, 0.5, {0.8, 0.2});
  cfg.loss = LossSpec::hinge();
  cfg.kernel = KernelSpec::gaussian(1.0, 1);
  cfg.schedule = {1.0, 0.25};  // lambda_n = n^(-1/4)
  cfg.n_grid = {100, 400, 1600, 6400};
  cfg.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20};
  cfg.test_m = 10000;
  return cfg;
}

ExperimentConfig ar1_regression_config() {
  ExperimentConfig cfg;
  cfg.name = "acceptance-ar1";
  Ar1Spec ar;
  ar.rho = 0.5;
  ar.noise_sd = 0.75;
  RegressionLabel lbl;
  lbl.mean = MeanFunction::from_name("sine", 1.0, 1.0);
  lbl.noise.scale = 0.3;
  lbl.noise.q = 4.0;  // Gaussian noise: every declared moment is finite
  ar.label = lbl;
  cfg.process.variant = ar;
  cfg.loss = LossSpec::eps_insensitive(0.1);
  cfg.kernel = KernelSpec::gaussian(1.0, 1);
  cfg.schedule = {0.05, 0.25};
  cfg.n_grid = {400, 1600, 6400};
  cfg.seeds = {1, 2, 3, 4, 5, 6, 7, 8};
  cfg.test_m = 10000;
  return cfg;
}

FiniteJoint random_joint(RandomStream& rng, int rows, int cols) {
  Eigen::MatrixXd p(rows, cols);
  double total = 0.0;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      double v = rng.uniform01();
      if (rng.uniform01() < 0.2) v = 0.0;
      p(i, j) = v;
      total += v;
    }
  if (total == 0.0) p(0, 0) = 1.0;
  return FiniteJoint(p / p.sum());
}

void criterion1() {
  Criterion c(1, "mixing inequality chain on 1000 random joints");
  RandomStream rng(20260809);
  for (int trial = 0; trial < 1000; ++trial) {
    const int m = 2 + static_cast<int>(rng.next_u64() % 5);
    const int mp = 2 + static_cast<int>(rng.next_u64() % 5);
    const MixingReport r = mixing_report(random_joint(rng, m, mp), 1);
    c.check(r.beta - 2.0 * r.alpha >= -1e-10, "2a <= b");
    c.check(std::max(r.phi_row, r.phi_col) - r.beta >= -1e-10, "b <= max(phi)");
    c.check(r.r2 - 4.0 * r.alpha >= -1e-10, "4a <= r2");
    c.check(2.0 * r.phi_sym - r.r2 >= -1e-10, "r2 <= 2 phi_sym");
    c.check(std::min(1.0, 2.0 * M_PI * r.phi_sym) - r.r2 >= -1e-10,
            "r2 <= min(1, 2 pi phi_sym)");
  }
}

void criterion2() {
  Criterion c(2, "exact coefficient decay of the stay-0.9 chain");
  const MarkovChainSpec mc = chain2(0.9, 0.5, {0.8, 0.2});
  for (int lag = 1; lag <= 10; ++lag) {
    const FiniteJoint joint = markov_lag_joint(mc, 1, 1 + lag);
    const double d = std::pow(0.8, lag);
    c.check(std::abs(alpha_coefficient(joint) - 0.25 * d) <= 1e-10, "alpha(lag)");
    c.check(std::abs(beta_coefficient(joint) - 0.5 * d) <= 1e-10, "beta(lag)");
    // phi by its defining ratio sup |mu(AB) - mu(A)mu(B)| / mu(A): the
    // enumeration oracle gives 0.5 * 0.8^lag for this chain
    c.check(std::abs(phi_coefficient(joint) - 0.5 * d) <= 1e-10, "phi(lag)");
    c.check(std::abs(r2_coefficient(joint) - d) <= 1e-10, "r2(lag)");
  }
}

void criterion3() {
  Criterion c(3, "bi-mixing double sum equals the stationary shortcut");
  const MarkovChainSpec mc = chain2(0.9, 0.5, {0.8, 0.2});
  for (int n : {10, 100, 1000}) {
    const double direct = bi_mixing_average_direct(mc, n, MixCoefficient::Alpha);
    const double shortcut = bi_mixing_average(mc, n, MixCoefficient::Alpha);
    c.check(std::abs(direct - shortcut) <= 1e-12,
            "n=" + std::to_string(n));
  }
}

void criterion4() {
  Criterion c(4, "solver: closed form, exact norm bound, grid oracle");
  const KernelSpec k = KernelSpec::gaussian(1.0, 1);

  // n=1 hinge closed form
  TrainingSet one;
  one.xs = Eigen::MatrixXd::Constant(1, 1, 0.7);
  one.ys = Eigen::VectorXd::Constant(1, 1.0);
  const SvmSolution sol1 = train(one, LossSpec::hinge(), k, 1.0);
  c.check(std::abs(sol1.f.eval(one.xs.row(0).transpose()) - 0.5) <= 1e-6, "f(x)=0.5");
  c.check(std::abs(sol1.objective - 0.75) <= 1e-6, "objective=0.75");

  // exact norm bound on 1000 random solves
  RandomStream rng(8888);
  const std::vector<LossSpec> losses = {LossSpec::hinge(), LossSpec::eps_insensitive(0.2),
                                        LossSpec::absolute(), LossSpec::least_squares(),
                                        LossSpec::logistic(), LossSpec::huber(1.0)};
  for (int trial = 0; trial < 1000; ++trial) {
    const LossSpec& loss = losses[static_cast<std::size_t>(trial) % losses.size()];
    const bool classify = loss.family() == LossFamily::MarginBased;
    const int n = 1 + static_cast<int>(rng.next_u64() % 10);
    TrainingSet t;
    t.xs.resize(n, 1);
    t.ys.resize(n);
    for (int i = 0; i < n; ++i) {
      t.xs(i, 0) = rng.uniform(-2.0, 2.0);
      t.ys(i) = classify ? (rng.bernoulli(0.5) ? 1.0 : -1.0) : rng.uniform(-2.0, 2.0);
    }
    const double lambda = std::pow(10.0, rng.uniform(-3.0, 1.0));
    const SvmSolution sol = train(t, loss, k, lambda);
    double r0 = 0.0;
    for (int i = 0; i < n; ++i) r0 += loss.eval(t.ys(i), 0.0);
    r0 /= n;
    if (!(sol.norm * sol.norm <= r0 / lambda)) {
      c.check(false, "norm bound violated");
      break;
    }
  }

  // grid-oracle agreement at n <= 3
  for (int n = 1; n <= 3; ++n) {
    TrainingSet t;
    t.xs.resize(n, 1);
    t.ys.resize(n);
    for (int i = 0; i < n; ++i) {
      t.xs(i, 0) = rng.uniform(-2.0, 2.0);
      t.ys(i) = rng.bernoulli(0.5) ? 1.0 : -1.0;
    }
    const double lambda = 0.4;
    const SvmSolution sol = train(t, LossSpec::hinge(), k, lambda);
    const Eigen::MatrixXd gram = k.gram(t.xs);
    double best = 1e300;
    Eigen::VectorXd a(n);
    const double step = 0.02;
    std::function<void(int)> scan = [&](int dim) {
      if (dim == n) {
        const Eigen::VectorXd fv = gram * a;
        double risk = 0.0;
        for (int i = 0; i < n; ++i) risk += LossSpec::hinge().eval(t.ys(i), fv(i));
        best = std::min(best, lambda * a.dot(fv) + risk / n);
        return;
      }
      for (double v = -2.0; v <= 2.0 + 1e-12; v += step) {
        a(dim) = v;
        scan(dim + 1);
      }
    };
    scan(0);
    c.check(std::abs(best - sol.objective) <= 1e-3, "grid oracle n=" + std::to_string(n));
  }
}

void criterion5() {
  Criterion c(5, "stability bound with the midpoint subgradient witness");
  int cells = 0;

  ExperimentConfig hinge_cfg = reference_chain_config();
  hinge_cfg.n_grid = {25, 50, 100, 200};
  const StabilityResult hinge_res = run_stability(hinge_cfg, 2);
  c.check(hinge_res.violations == 0, "hinge lhs <= rhs");
  c.check(hinge_res.h_violations == 0, "hinge |h| bound");
  cells += static_cast<int>(hinge_res.rows.size());

  ExperimentConfig eps_cfg = ar1_regression_config();
  eps_cfg.schedule = {1.0, 0.25};
  eps_cfg.n_grid = {25, 50, 100, 200};
  eps_cfg.seeds = reference_chain_config().seeds;
  const StabilityResult eps_res = run_stability(eps_cfg, 2);
  c.check(eps_res.violations == 0, "eps-insensitive lhs <= rhs");
  c.check(eps_res.h_violations == 0, "eps-insensitive |h| bound");
  cells += static_cast<int>(eps_res.rows.size());

  c.note("cells=" + std::to_string(cells));
}

void criterion6() {
  Criterion c(6, "AMS averages: exact period-2 bound, empirical chain LLN");
  // exact matrix-power averages of the period-2 chain started at delta_0
  const MarkovChainSpec period2 = chain2(0.0, 1.0, {0.8, 0.2});
  Eigen::VectorXd p = period2.init;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(2);
  bool exact_ok = true;
  for (int n = 1; n <= 10000; ++n) {
    if (n > 1) p = period2.trans.transpose() * p;
    acc += p;
    if (std::abs(acc(0) / n - 0.5) > 0.5 / n + 1e-15) exact_ok = false;
  }
  c.check(exact_ok, "|P_n({0}) - 1/2| <= 1/(2n)");

  // empirical indicator averages on the mixing chain
  ProcessSpec spec;
  spec.variant = chain2(0.9, 0.5, {0.8, 0.2});
  std::vector<std::uint64_t> seeds(100);
  for (std::uint64_t i = 0; i < 100; ++i) seeds[i] = i + 1;
  const LlnTable table = lln_diagnostic(
      spec, [](const Eigen::VectorXd& x, double) { return x(0) < 0.0 ? 1.0 : 0.0; },
      {10000}, seeds);
  c.check(table.median_by_n.back() <= 0.02,
          "median dev " + std::to_string(table.median_by_n.back()));
}

std::string run_c7(Criterion& c, std::string* valid_csv, std::string* invalid_csv) {
  const ExperimentConfig cfg = reference_chain_config();
  const ExperimentResult valid = run_consistency(cfg, 2);

  ExperimentConfig flat = cfg;
  flat.schedule = {0.3, 0.0};  // lambda fixed at 0.3: not a null sequence
  const ExperimentResult control = run_consistency(flat, 2);

  const double first = valid.median_excess.at(100);
  const double last = valid.median_excess.at(6400);
  const double control_last = control.median_excess.at(6400);
  c.check(valid.norm_violations == 0 && control.norm_violations == 0, "norm bound");
  c.check(last <= 0.05, "terminal excess " + std::to_string(last));
  c.check(last * 2.0 <= first, "2x decrease from " + std::to_string(first));
  c.check(control_last >= 2.0 * last, "control plateau " + std::to_string(control_last));
  c.check(schedule_verdict(cfg).valid, "schedule verdict valid");
  c.check(!schedule_verdict(flat).valid, "control verdict invalid");
  if (valid_csv) *valid_csv = sweep_csv(valid);
  if (invalid_csv) *invalid_csv = sweep_csv(control);
  char buf[128];
  std::snprintf(buf, sizeof buf, "excess %.4f -> %.4f, control %.4f", first, last,
                control_last);
  return buf;
}

std::string run_c8(Criterion& c, std::string* csv) {
  const ExperimentConfig cfg = ar1_regression_config();
  c.check(schedule_verdict(cfg).valid, "schedule verdict");
  const ExperimentResult result = run_consistency(cfg, 2);
  c.check(result.norm_violations == 0, "norm bound");
  const double last = result.median_excess.at(6400);
  c.check(last <= 0.05, "terminal excess " + std::to_string(last));
  if (csv) *csv = sweep_csv(result);
  char buf[96];
  std::snprintf(buf, sizeof buf, "excess at 6400: %.4f (bayes %.4f)", last, result.bayes);
  return buf;
}

void criterion9() {
  Criterion c(9, "schedule verdicts: hinge accept region and exact margins");
  const LossSpec hinge = LossSpec::hinge();
  const KernelSpec k = KernelSpec::gaussian(1.0, 1);
  for (int i = 1; i <= 49; ++i) {
    const double gamma = i / 100.0;
    c.check(validate_classification({1.0, gamma}, hinge, k, 1.0).valid,
            "gamma=" + std::to_string(gamma));
  }
  c.check(!validate_classification({1.0, 0.0}, hinge, k, 1.0).valid, "gamma=0");
  c.check(!validate_classification({1.0, 0.5}, hinge, k, 1.0).valid, "gamma=1/2");
  c.check(!validate_classification({1.0, 0.51}, hinge, k, 1.0).valid, "gamma=0.51");
  c.check(!validate_classification({1.0, 0.75}, hinge, k, 1.0).valid, "gamma=3/4");

  struct Case {
    double p, alpha, beta, gamma, margin_mean, margin_var;
  };
  const Case cases[] = {
      {1.0, 1.0, 1.0, 0.25, 1.75, 0.5},       {1.0, 1.0, 1.0, 0.5, 1.5, 0.0},
      {1.0, 0.5, 0.5, 0.125, 0.875, 0.25},    {1.0, 0.5, 1.0, 0.25, 0.75, 0.5},
      {1.0, 0.25, 0.25, 0.0625, 0.4375, 0.125}, {1.5, 1.0, 1.0, 0.25, 1.625, 0.25},
      {1.5, 1.0, 0.5, 0.25, 1.625, -0.25},    {1.5, 0.5, 1.0, 0.125, 0.8125, 0.625},
      {1.5, 0.75, 0.75, 0.25, 1.125, 0.0},    {1.5, 1.0, 1.0, 0.5, 1.25, -0.5},
      {2.0, 1.0, 1.0, 0.125, 1.75, 0.5},      {2.0, 1.0, 1.0, 0.25, 1.5, 0.0},
      {2.0, 0.5, 1.0, 0.125, 0.75, 0.5},      {2.0, 0.5, 0.5, 0.0625, 0.875, 0.25},
      {2.0, 0.25, 0.25, 0.03125, 0.4375, 0.125}, {2.0, 1.0, 0.25, 0.0625, 1.875, 0.0},
      {2.0, 0.75, 0.75, 0.125, 1.25, 0.25},   {1.0, 0.125, 0.125, 0.03125, 0.21875, 0.0625},
      {1.0, 1.0, 0.125, 0.0625, 1.9375, 0.0}, {2.0, 1.0, 0.5, 0.0625, 1.875, 0.25},
  };
  int idx = 0;
  for (const Case& cs : cases) {
    const Verdict v = validate_regression({1.0, cs.gamma}, cs.p, cs.alpha, cs.beta);
    const bool expect = cs.margin_mean > 0.0 && cs.margin_var > 0.0;
    const double margin = std::min(cs.margin_mean, cs.margin_var);
    c.check(v.valid == expect && v.limiting_exponent == margin,
            "case " + std::to_string(idx));
    ++idx;
  }
}

}  // namespace

int main() {
  std::printf("acceptance suite\n================\n");
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();

  std::string c7_valid_a, c7_invalid_a, c8_a;
  {
    Criterion c(7, "consistency sweep: chain classification with hinge");
    c.note(run_c7(c, &c7_valid_a, &c7_invalid_a));
  }
  {
    Criterion c(8, "consistency sweep: AR(1) regression with unbounded noise");
    c.note(run_c8(c, &c8_a));
  }
  criterion9();
  {
    Criterion c(10, "determinism: repeated sweeps give byte-identical CSVs");
    std::string c7_valid_b, c7_invalid_b, c8_b;
    run_c7(c, &c7_valid_b, &c7_invalid_b);
    run_c8(c, &c8_b);
    c.check(c7_valid_a == c7_valid_b, "chain sweep CSV differs");
    c.check(c7_invalid_a == c7_invalid_b, "control sweep CSV differs");
    c.check(c8_a == c8_b, "regression sweep CSV differs");
  }

  std::printf("================\n%s (%d failed)\n",
              g_failures == 0 ? "ALL CRITERIA PASS" : "FAILURES", g_failures);
  return g_failures == 0 ? 0 : 1;
}
