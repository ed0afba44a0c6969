#pragma once

#include <cstdint>

#include "depsvm/kernel.hpp"
#include "depsvm/loss.hpp"
#include "depsvm/process.hpp"

namespace depsvm {

struct SvmSolution {
  RkhsFunction f;          // points = training inputs
  double lambda = 0.0;
  double objective = 0.0;  // lambda ||f||^2 + empirical risk
  double empirical_risk = 0.0;
  double norm = 0.0;       // ||f||_H
  /// Certified optimality measure: the duality gap for piecewise-linear
  /// losses, the relative representer gradient residual for smooth ones.
  double opt_residual = 0.0;
  int iterations = 0;
};

struct TrainOptions {
  double tol = 1e-8;
  int max_sweeps = 200000;
  /// Start from a seeded random feasible point instead of zero (used by the
  /// uniqueness checks).
  bool random_init = false;
  std::uint64_t init_seed = 0;
};

/// Solves min_f lambda ||f||_H^2 + (1/n) sum_i L(y_i, f(x_i)) in the finite
/// representer form f = sum_i alpha_i k(x_i, .). Piecewise-linear losses go
/// through an exact coordinate solver on the box dual; smooth losses through
/// descent on the coefficient problem (least squares: a linear solve).
/// The returned solution always satisfies ||f||_H <= sqrt(R_T(0) / lambda).
SvmSolution train(const TrainingSet& t, const LossSpec& loss, const KernelSpec& kernel,
                  double lambda, const TrainOptions& opts = {});

double objective_value(const RkhsFunction& f, const TrainingSet& t, const LossSpec& loss,
                       double lambda);

/// Surrogate for the infinite-sample solution: trains on m i.i.d. draws from
/// the stationary mean. The approximation quality is the caller's
/// responsibility (harness uses m >= 20 n); m below 1000 is rejected.
SvmSolution reference_solution(const ProcessSpec& spec, const LossSpec& loss,
                               const KernelSpec& kernel, double lambda, int m,
                               std::uint64_t seed, const TrainOptions& opts = {});

struct StabilityWitness {
  double lhs = 0.0;          // ||f_ref - f_T||_H
  double rhs = 0.0;          // (1/lambda) ||E_ref h Phi - E_T h Phi||_H
  double h_sup = 0.0;        // max |h| over both samples
  double h_sup_bound = 0.0;  // |L|_{B_lambda,1}
  bool holds = false;        // lhs <= rhs + slack
};

/// Empirical check of the solution-stability bound: h is the midpoint
/// subgradient of t -> L(y, t) taken at the reference solution's
/// predictions; rhs is the kernel-mean deviation of h Phi between the
/// reference sample and T, scaled by 1/lambda.
StabilityWitness stability_witness(const SvmSolution& f_ref, const TrainingSet& t,
                                   const TrainingSet& ref_sample, const LossSpec& loss,
                                   const KernelSpec& kernel, double lambda,
                                   const TrainOptions& opts = {}, double slack = 1e-8);

}  // namespace depsvm
