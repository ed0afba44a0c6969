#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "depsvm/kernel.hpp"
#include "depsvm/loss.hpp"
#include "depsvm/process.hpp"
#include "depsvm/schedule.hpp"
#include "depsvm/solver.hpp"

namespace depsvm {

struct ExperimentConfig {
  std::string name = "experiment";
  ProcessSpec process;
  LossSpec loss = LossSpec::hinge();
  KernelSpec kernel = KernelSpec::gaussian(1.0, 1);
  ScheduleSpec schedule;
  std::vector<int> n_grid;
  std::vector<std::uint64_t> seeds;
  int test_m = 10000;
  int ref_m_factor = 20;
  double tol = 1e-8;
  // process exponents assumed when judging the schedule
  double mixing_alpha = 1.0;
  double mixing_beta = 1.0;
};

/// Cross-field validation: loss/label-model pairing, moment orders, grid
/// shape. Throws std::invalid_argument naming the offending field.
void validate_config(const ExperimentConfig& cfg);

/// Schedule verdict for the config's loss/process pairing (classification or
/// regression route picked automatically).
Verdict schedule_verdict(const ExperimentConfig& cfg);

struct RiskEstimate {
  double value = 0.0;
  double half_width = 0.0;  // 95% normal-approximation; 0 for exact values
  bool exact = false;
};

/// Risk of f under the stationary mean: exact closed form for finite-state
/// classification, Monte Carlo on sample_stationary otherwise.
RiskEstimate estimate_risk(const RkhsFunction& f, const ProcessSpec& spec,
                           const LossSpec& loss, int m, std::uint64_t seed);

struct SweepRow {
  int n = 0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  double train_risk = 0.0;
  double risk_est = 0.0;
  double risk_ci = 0.0;
  double future_risk = 0.0;  // average loss over a held-out future window
  double bayes_risk = 0.0;
  double excess_risk = 0.0;
  double f_norm = 0.0;
  double norm_bound = 0.0;
  double solver_residual = 0.0;
  int iterations = 0;
};

struct ExperimentResult {
  std::vector<SweepRow> rows;  // ordered by (n, seed)
  double bayes = 0.0;
  Verdict verdict;
  int norm_violations = 0;
  std::map<int, double> median_excess;  // per n
};

/// Consistency sweep: one fresh dependent path per (n, seed), trained at
/// lambda_n, risk measured under the stationary mean. Grid cells run on a
/// work queue; rows are ordered deterministically regardless of scheduling.
ExperimentResult run_consistency(const ExperimentConfig& cfg, int jobs = 1);

struct StabilityRow {
  int n = 0;
  std::uint64_t seed = 0;
  double lambda = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double h_sup = 0.0;
  double h_sup_bound = 0.0;
  bool holds = false;
};

struct StabilityResult {
  std::vector<StabilityRow> rows;
  int violations = 0;    // lhs > rhs + slack
  int h_violations = 0;  // |h| above its bound
};

/// Stability-bound check across the grid: the reference solution is trained
/// on ref_m_factor * n stationary draws per cell.
StabilityResult run_stability(const ExperimentConfig& cfg, int jobs = 1,
                              double slack = 1e-8);

struct LlnFunctionTable {
  std::string label;
  LlnTable table;
};

/// LLN diagnostics for a set of bounded test functions; finite-state chains
/// default to their state indicators.
std::vector<LlnFunctionTable> run_lln(const ExperimentConfig& cfg);

}  // namespace depsvm
