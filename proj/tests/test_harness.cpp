#include <doctest.h>

#include <cmath>

#include "depsvm/csvio.hpp"
#include "depsvm/harness.hpp"

using namespace depsvm;

namespace {

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

ExperimentConfig chain_config() {
  ExperimentConfig cfg;
  cfg.name = "mini";
  cfg.process.variant = chain2(0.9, 0.5, {0.8, 0.2});
  cfg.loss = LossSpec::hinge();
  cfg.kernel = KernelSpec::gaussian(1.0, 1);
  cfg.schedule = {1.0, 0.25};
  cfg.n_grid = {50, 200};
  cfg.seeds = {1, 2, 3, 4, 5};
  cfg.test_m = 2000;
  cfg.ref_m_factor = 20;
  return cfg;
}

ExperimentConfig ar1_config() {
  ExperimentConfig cfg;
  cfg.name = "mini-reg";
  Ar1Spec ar;
  ar.rho = 0.5;
  ar.noise_sd = 0.75;
  RegressionLabel lbl;
  lbl.mean = MeanFunction::from_name("sine", 1.0, 1.0);
  lbl.noise.scale = 0.3;
  lbl.noise.q = 4.0;
  ar.label = lbl;
  cfg.process.variant = ar;
  cfg.loss = LossSpec::eps_insensitive(0.1);
  cfg.kernel = KernelSpec::gaussian(1.0, 1);
  cfg.schedule = {0.05, 0.25};
  cfg.n_grid = {100, 300};
  cfg.seeds = {1, 2, 3};
  cfg.test_m = 2000;
  return cfg;
}

}  // namespace

TEST_CASE("config validation catches cross-field mismatches") {
  ExperimentConfig cfg = chain_config();
  CHECK_NOTHROW(validate_config(cfg));

  ExperimentConfig bad_grid = chain_config();
  bad_grid.n_grid = {200, 100};
  CHECK_THROWS_WITH_AS(validate_config(bad_grid), doctest::Contains("n_grid"),
                       std::invalid_argument);

  ExperimentConfig small_m = chain_config();
  small_m.test_m = 10;
  CHECK_THROWS_WITH_AS(validate_config(small_m), doctest::Contains("test_m"),
                       std::invalid_argument);

  // margin loss on a regression label model
  ExperimentConfig mismatch = ar1_config();
  mismatch.loss = LossSpec::hinge();
  CHECK_THROWS_WITH_AS(validate_config(mismatch), doctest::Contains("margin"),
                       std::invalid_argument);

  // loss growth order above the declared moment order
  ExperimentConfig moments = ar1_config();
  moments.loss = LossSpec::least_squares();
  auto& reg = std::get<RegressionLabel>(std::get<Ar1Spec>(moments.process.variant).label);
  reg.noise.q = 1.5;
  CHECK_THROWS_WITH_AS(validate_config(moments), doctest::Contains("q"),
                       std::invalid_argument);

  ExperimentConfig dim = chain_config();
  dim.kernel = KernelSpec::gaussian(1.0, 3);
  CHECK_THROWS_WITH_AS(validate_config(dim), doctest::Contains("input_dim"),
                       std::invalid_argument);
}

TEST_CASE("schedule verdict picks the matching route") {
  const Verdict vc = schedule_verdict(chain_config());
  CHECK(vc.valid);
  CHECK(vc.limiting_exponent == doctest::Approx(0.5));

  const Verdict vr = schedule_verdict(ar1_config());  // p = 1 from the loss
  CHECK(vr.valid);
  CHECK(vr.limiting_exponent == doctest::Approx(0.5));
}

TEST_CASE("estimate_risk: exact closed form for finite-state classification") {
  const ExperimentConfig cfg = chain_config();
  const KernelSpec& k = cfg.kernel;

  // zero function: hinge risk is exactly 1
  RkhsFunction zero{k, Eigen::MatrixXd(0, 1), Eigen::VectorXd(0)};
  const RiskEstimate r0 = estimate_risk(zero, cfg.process, cfg.loss, 2000, 1);
  CHECK(r0.exact);
  CHECK(r0.half_width == 0.0);
  CHECK(r0.value == doctest::Approx(1.0));

  // interpolate the Bayes predictor t = sign(2 eta - 1) at the two states
  Eigen::MatrixXd pts(2, 1);
  pts << -1.0, 1.0;
  Eigen::VectorXd target(2);
  target << 1.0, -1.0;
  const Eigen::VectorXd coeffs = k.gram(pts).ldlt().solve(target);
  RkhsFunction bayes_f{k, pts, coeffs};
  const RiskEstimate rb = estimate_risk(bayes_f, cfg.process, cfg.loss, 2000, 1);
  CHECK(rb.value == doctest::Approx(0.4).epsilon(1e-10));
}

TEST_CASE("estimate_risk: Monte Carlo hits the irreducible level") {
  ExperimentConfig cfg = ar1_config();
  auto& reg = std::get<RegressionLabel>(std::get<Ar1Spec>(cfg.process.variant).label);
  reg.mean = MeanFunction{};  // zero mean: the zero function is optimal
  const RkhsFunction zero{cfg.kernel, Eigen::MatrixXd(0, 1), Eigen::VectorXd(0)};
  const RiskEstimate r =
      estimate_risk(zero, cfg.process, LossSpec::least_squares(), 20000, 5);
  CHECK_FALSE(r.exact);
  CHECK(r.half_width > 0.0);
  CHECK(std::abs(r.value - 0.09) <= 3.0 * r.half_width);
  CHECK_THROWS_AS(estimate_risk(zero, cfg.process, LossSpec::least_squares(), 10, 5),
                  std::invalid_argument);
}

TEST_CASE("consistency sweep on the reference chain task") {
  const ExperimentConfig cfg = chain_config();
  const ExperimentResult result = run_consistency(cfg);

  CHECK(result.rows.size() == 10);
  CHECK(result.bayes == doctest::Approx(0.4).epsilon(1e-10));
  CHECK(result.norm_violations == 0);

  // rows ordered by (n, seed); risks exact for the chain task
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const SweepRow& row = result.rows[i];
    CHECK(row.n == (i < 5 ? 50 : 200));
    CHECK(row.risk_ci == 0.0);
    CHECK(row.lambda == doctest::Approx(cfg.schedule.lambda(row.n)));
    CHECK(row.f_norm <= row.norm_bound);
    CHECK(row.solver_residual <= cfg.tol);
    CHECK(row.excess_risk == doctest::Approx(row.risk_est - 0.4));
    // the held-out future window estimates the same stationary risk
    CHECK(std::abs(row.future_risk - row.risk_est) <= 0.2);
  }
  CHECK(result.median_excess.at(200) <= result.median_excess.at(50) + 0.05);
}

TEST_CASE("sweep rows are deterministic and scheduling-independent") {
  const ExperimentConfig cfg = chain_config();
  const std::string a = sweep_csv(run_consistency(cfg, 1));
  const std::string b = sweep_csv(run_consistency(cfg, 1));
  const std::string c = sweep_csv(run_consistency(cfg, 2));
  CHECK(a == b);
  CHECK(a == c);
}

TEST_CASE("regression sweep runs end to end") {
  const ExperimentConfig cfg = ar1_config();
  const ExperimentResult result = run_consistency(cfg, 2);
  CHECK(result.rows.size() == 6);
  CHECK(result.norm_violations == 0);
  // irreducible level for eps-insensitive under the 0.3 Gaussian noise
  CHECK(result.bayes == doctest::Approx(0.1528).epsilon(1e-3));
  for (const SweepRow& row : result.rows) {
    CHECK(row.risk_ci > 0.0);
    CHECK(row.excess_risk >= -3.0 * row.risk_ci);  // never significantly negative
  }
}

TEST_CASE("stability run reports no violations on the chain task") {
  ExperimentConfig cfg = chain_config();
  cfg.n_grid = {20, 40};
  cfg.seeds = {1, 2, 3};
  const StabilityResult result = run_stability(cfg);
  CHECK(result.rows.size() == 6);
  CHECK(result.violations == 0);
  CHECK(result.h_violations == 0);
  for (const StabilityRow& row : result.rows) {
    CHECK(row.h_sup_bound == doctest::Approx(1.0));  // hinge
    CHECK(row.lhs <= row.rhs + 1e-8);
  }
}

TEST_CASE("reference solutions approach the Bayes predictor as lambda shrinks") {
  const ExperimentConfig cfg = chain_config();
  // balanced labels independent of x: the zero function is optimal
  ProcessSpec balanced;
  balanced.variant = chain2(0.9, 0.5, {0.5, 0.5});
  const SvmSolution flat =
      reference_solution(balanced, cfg.loss, cfg.kernel, 1.0, 2000, 11);
  CHECK(flat.norm <= 0.1);

  // eta = (0.8, 0.2): the reference risk approaches the Bayes level 0.4
  const SvmSolution ref =
      reference_solution(cfg.process, cfg.loss, cfg.kernel, 0.005, 4000, 11);
  const RiskEstimate risk = estimate_risk(ref.f, cfg.process, cfg.loss, 2000, 1);
  CHECK(risk.value == doctest::Approx(0.4).epsilon(0.05));
}

TEST_CASE("i.i.d. special case runs through the dependent pipeline") {
  ExperimentConfig cfg = chain_config();
  cfg.name = "iid";
  IidSpec iid;
  UniformBox box;
  box.lo = Eigen::VectorXd::Constant(1, -1.0);
  box.hi = Eigen::VectorXd::Constant(1, 1.0);
  iid.x_dist = box;
  ClassificationLabel lbl;
  lbl.p_left = 0.8;
  lbl.p_right = 0.2;
  lbl.threshold = 0.0;
  iid.label = lbl;
  cfg.process.variant = iid;
  cfg.n_grid = {100, 400};
  cfg.seeds = {1, 2, 3};

  const ExperimentResult result = run_consistency(cfg);
  CHECK(result.bayes == doctest::Approx(0.4));
  CHECK(result.norm_violations == 0);
  for (const SweepRow& row : result.rows) CHECK(row.risk_ci > 0.0);  // Monte Carlo route
  CHECK(result.median_excess.at(400) <= result.median_excess.at(100) + 0.1);
}

TEST_CASE("lln run uses state indicators for chains") {
  ExperimentConfig cfg = chain_config();
  cfg.n_grid = {100, 1000};
  cfg.seeds = {1, 2, 3, 4, 5, 6, 7};
  const auto tables = run_lln(cfg);
  CHECK(tables.size() == 2);
  CHECK(tables[0].label == "state_0");
  for (const auto& ft : tables) {
    CHECK(ft.table.expectation == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ft.table.median_by_n.back() <= ft.table.median_by_n.front() + 0.02);
  }
}
