#include "depsvm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "depsvm/rng.hpp"
#include "depsvm/schedule.hpp"

namespace depsvm {

namespace {

struct UniqueIndex {
  Eigen::MatrixXd points;        // u x d unique rows
  std::vector<int> index;        // sample -> unique row
};

UniqueIndex compress_points(const Eigen::MatrixXd& xs) {
  UniqueIndex out;
  const int d = static_cast<int>(xs.cols());
  std::map<std::vector<double>, int> seen;
  out.index.resize(static_cast<std::size_t>(xs.rows()));
  std::vector<std::vector<double>> rows;
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    std::vector<double> key(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) key[static_cast<std::size_t>(j)] = xs(i, j);
    auto [it, inserted] = seen.emplace(key, static_cast<int>(rows.size()));
    if (inserted) rows.push_back(key);
    out.index[static_cast<std::size_t>(i)] = it->second;
  }
  out.points.resize(static_cast<Eigen::Index>(rows.size()), d);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (int j = 0; j < d; ++j) out.points(static_cast<Eigen::Index>(r), j) = rows[r][static_cast<std::size_t>(j)];
  return out;
}

double soft_threshold(double v, double eps) {
  if (v > eps) return v - eps;
  if (v < -eps) return v + eps;
  return 0.0;
}

struct DualBox {
  double lo, hi, eps;  // feasible interval for c_i and the |c| penalty weight
};

DualBox dual_box(const LossSpec& loss, double y, int n) {
  const double cap = 1.0 / n;
  if (loss.kind() == LossKind::Hinge) {
    if (y > 0.0) return {0.0, cap, 0.0};
    return {-cap, 0.0, 0.0};
  }
  const double eps = loss.kind() == LossKind::EpsilonInsensitive ? loss.param() : 0.0;
  return {-cap, cap, eps};
}

// best value of c y - eps |c| over {lo, 0, hi}; used for zero-diagonal points
double best_linear(const DualBox& box, double y) {
  double best_c = 0.0, best_v = 0.0;
  for (double c : {box.lo, box.hi}) {
    const double v = c * y - box.eps * std::abs(c);
    if (v > best_v) {
      best_v = v;
      best_c = c;
    }
  }
  return best_c;
}

struct Objective {
  double primal;
  double risk;
  double norm_sq;
};

Objective primal_objective(const TrainingSet& t, const LossSpec& loss, double lambda,
                           const std::vector<int>& uidx, const Eigen::VectorXd& f_unique,
                           const Eigen::VectorXd& c) {
  const int n = t.n();
  double risk = 0.0;
  double cf = 0.0;
  for (int i = 0; i < n; ++i) {
    const double fi = f_unique(uidx[static_cast<std::size_t>(i)]);
    risk += loss.eval(t.ys(i), fi);
    cf += c(i) * fi;
  }
  risk /= n;
  const double norm_sq = std::max(0.0, cf / (2.0 * lambda));  // ||f||^2 = c^T K c / 4 lambda^2
  return {lambda * norm_sq + risk, risk, norm_sq};
}

// ---------------------------------------------------------------------------
// exact coordinate ascent on the box dual (hinge, absolute, eps-insensitive)
// ---------------------------------------------------------------------------

SvmSolution solve_piecewise_linear(const TrainingSet& t, const LossSpec& loss,
                                   const KernelSpec& kernel, double lambda,
                                   const TrainOptions& opts) {
  const int n = t.n();
  const UniqueIndex uq = compress_points(t.xs);
  const int u = static_cast<int>(uq.points.rows());
  const Eigen::MatrixXd g = kernel.gram(uq.points);

  std::vector<DualBox> box(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) box[static_cast<std::size_t>(i)] = dual_box(loss, t.ys(i), n);

  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd f_unique = Eigen::VectorXd::Zero(u);
  std::vector<char> frozen(static_cast<std::size_t>(n), 0);

  if (opts.random_init) {
    RandomStream rng(opts.init_seed, 7);
    for (int i = 0; i < n; ++i) {
      const auto& b = box[static_cast<std::size_t>(i)];
      c(i) = rng.uniform(b.lo, b.hi);
    }
    for (int i = 0; i < n; ++i)
      f_unique += (c(i) / (2.0 * lambda)) * g.col(uq.index[static_cast<std::size_t>(i)]);
  }

  // points whose kernel section is the zero function: the dual is linear in
  // them, pin them at the best box endpoint
  for (int i = 0; i < n; ++i) {
    const int ui = uq.index[static_cast<std::size_t>(i)];
    if (g(ui, ui) <= 1e-300) {
      c(i) = best_linear(box[static_cast<std::size_t>(i)], t.ys(i));
      frozen[static_cast<std::size_t>(i)] = 1;
    }
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  int sweeps = 0;
  double gap = std::numeric_limits<double>::infinity();
  RandomStream shuffle_rng(0x5eedULL, 11);

  auto dual_value = [&]() {
    double lin = 0.0, cf = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto& b = box[static_cast<std::size_t>(i)];
      lin += c(i) * t.ys(i) - b.eps * std::abs(c(i));
      cf += c(i) * f_unique(uq.index[static_cast<std::size_t>(i)]);
    }
    return lin - 0.5 * cf;  // lin - lambda ||f||^2
  };

  while (sweeps < opts.max_sweeps) {
    // shrunk phase: sweep the unfrozen coordinates until they stall
    for (int inner = 0; inner < 50 && sweeps < opts.max_sweeps; ++inner) {
      ++sweeps;
      // Fisher-Yates with the deterministic stream
      for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(shuffle_rng.next_u64() % static_cast<std::uint64_t>(i + 1));
        std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
      }
      double max_step = 0.0;
      for (int oi = 0; oi < n; ++oi) {
        const int i = order[static_cast<std::size_t>(oi)];
        if (frozen[static_cast<std::size_t>(i)]) continue;
        const int ui = uq.index[static_cast<std::size_t>(i)];
        const double kii = g(ui, ui);
        const double f_minus = f_unique(ui) - c(i) * kii / (2.0 * lambda);
        const auto& b = box[static_cast<std::size_t>(i)];
        double cnew = soft_threshold(t.ys(i) - f_minus, b.eps) * 2.0 * lambda / kii;
        cnew = std::clamp(cnew, b.lo, b.hi);
        const double delta = cnew - c(i);
        if (delta != 0.0) {
          c(i) = cnew;
          f_unique += (delta / (2.0 * lambda)) * g.col(ui);
          max_step = std::max(max_step, std::abs(delta));
        } else {
          frozen[static_cast<std::size_t>(i)] = 1;
        }
      }
      if (max_step == 0.0) break;
    }
    // full pass with everything unfrozen, then a gap check
    for (int i = 0; i < n; ++i) {
      const int ui = uq.index[static_cast<std::size_t>(i)];
      if (g(ui, ui) <= 1e-300) continue;
      frozen[static_cast<std::size_t>(i)] = 0;
    }
    ++sweeps;
    for (int i = 0; i < n; ++i) {
      if (frozen[static_cast<std::size_t>(i)]) continue;
      const int ui = uq.index[static_cast<std::size_t>(i)];
      const double kii = g(ui, ui);
      const double f_minus = f_unique(ui) - c(i) * kii / (2.0 * lambda);
      const auto& b = box[static_cast<std::size_t>(i)];
      double cnew = soft_threshold(t.ys(i) - f_minus, b.eps) * 2.0 * lambda / kii;
      cnew = std::clamp(cnew, b.lo, b.hi);
      const double delta = cnew - c(i);
      if (delta != 0.0) {
        c(i) = cnew;
        f_unique += (delta / (2.0 * lambda)) * g.col(ui);
      }
    }
    const Objective obj = primal_objective(t, loss, lambda, uq.index, f_unique, c);
    gap = std::max(0.0, obj.primal - dual_value());
    if (gap <= opts.tol) break;
  }

  SvmSolution sol;
  sol.lambda = lambda;
  sol.iterations = sweeps;
  sol.opt_residual = gap;
  sol.f = RkhsFunction{kernel, t.xs, c / (2.0 * lambda)};

  const Objective obj = primal_objective(t, loss, lambda, uq.index, f_unique, c);
  sol.objective = obj.primal;
  sol.empirical_risk = obj.risk;
  sol.norm = std::sqrt(obj.norm_sq);
  return sol;
}

// ---------------------------------------------------------------------------
// smooth losses: least squares via CG, the rest by descent in H
// ---------------------------------------------------------------------------

SvmSolution solve_least_squares(const TrainingSet& t, const LossSpec& loss,
                                const KernelSpec& kernel, double lambda,
                                const TrainOptions& opts) {
  const int n = t.n();
  const Eigen::MatrixXd k = kernel.gram(t.xs);
  // stationarity: (n lambda I + K) alpha = y zeroes the representer gradient
  const Eigen::MatrixXd a = n * lambda * Eigen::MatrixXd::Identity(n, n) + k;
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd r = t.ys;  // residual y - A alpha
  Eigen::VectorXd p = r;
  double rs = r.squaredNorm();
  const double stop = std::max(1e-300, 1e-28 * std::max(1.0, t.ys.squaredNorm()));
  int it = 0;
  for (; it < 10 * n + 50 && rs > stop; ++it) {
    const Eigen::VectorXd ap = a * p;
    const double step = rs / p.dot(ap);
    alpha += step * p;
    r -= step * ap;
    const double rs_new = r.squaredNorm();
    p = r + (rs_new / rs) * p;
    rs = rs_new;
  }
  if (opts.random_init) {
    // the linear solve ignores the initialization by construction
  }

  SvmSolution sol;
  sol.lambda = lambda;
  sol.iterations = it;
  sol.f = RkhsFunction{kernel, t.xs, alpha};
  const Eigen::VectorXd fv = k * alpha;
  double risk = 0.0;
  for (int i = 0; i < n; ++i) risk += loss.eval(t.ys(i), fv(i));
  risk /= n;
  sol.empirical_risk = risk;
  const double norm_sq = std::max(0.0, alpha.dot(fv));
  sol.norm = std::sqrt(norm_sq);
  sol.objective = lambda * norm_sq + risk;
  // relative representer gradient residual
  Eigen::VectorXd grad(n);
  for (int i = 0; i < n; ++i) grad(i) = 2.0 * (fv(i) - t.ys(i));
  const Eigen::VectorXd v = 2.0 * lambda * alpha + grad / n;
  sol.opt_residual = (k * v).norm() / (1.0 + fv.norm());
  return sol;
}

SvmSolution solve_smooth(const TrainingSet& t, const LossSpec& loss,
                         const KernelSpec& kernel, double lambda,
                         const TrainOptions& opts) {
  const int n = t.n();
  const Eigen::MatrixXd k = kernel.gram(t.xs);

  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  if (opts.random_init) {
    RandomStream rng(opts.init_seed, 7);
    for (int i = 0; i < n; ++i) alpha(i) = rng.uniform(-1.0, 1.0) / n;
  }
  Eigen::VectorXd fv = k * alpha;

  auto risk_of = [&](const Eigen::VectorXd& f) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += loss.eval(t.ys(i), f(i));
    return acc / n;
  };
  auto obj_of = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& f) {
    return lambda * std::max(0.0, a.dot(f)) + risk_of(f);
  };

  // H-space gradient steps; the Hessian in H is bounded by
  // 2 lambda + L'' max_i k(x_i, x_i)
  const double curv = loss.curvature_bound();
  double eta = 1.0 / (2.0 * lambda + curv * k.diagonal().maxCoeff());
  double obj = obj_of(alpha, fv);
  double residual = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < opts.max_sweeps; ++it) {
    Eigen::VectorXd grad(n);
    for (int i = 0; i < n; ++i) {
      const Interval s = loss.subgradient(t.ys(i), fv(i));
      grad(i) = 0.5 * (s.lo + s.hi);
    }
    const Eigen::VectorXd d = 2.0 * lambda * alpha + grad / n;
    const Eigen::VectorXd kd = k * d;
    residual = kd.norm() / (1.0 + fv.norm());
    if (residual <= opts.tol) break;

    double step = eta;
    const double slope = d.dot(kd);  // directional derivative along -d
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      const Eigen::VectorXd a_try = alpha - step * d;
      const Eigen::VectorXd f_try = fv - step * kd;
      const double o_try = obj_of(a_try, f_try);
      if (o_try <= obj - 0.25 * step * slope) {
        alpha = a_try;
        fv = f_try;
        obj = o_try;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // step underflow: at numerical optimum
    eta = std::min(step * 1.5, 1e6 * eta);
  }

  SvmSolution sol;
  sol.lambda = lambda;
  sol.iterations = it;
  sol.opt_residual = residual;
  sol.f = RkhsFunction{kernel, t.xs, alpha};
  sol.empirical_risk = risk_of(fv);
  const double norm_sq = std::max(0.0, alpha.dot(fv));
  sol.norm = std::sqrt(norm_sq);
  sol.objective = lambda * norm_sq + sol.empirical_risk;
  return sol;
}

void clamp_norm_bound(SvmSolution& sol, const TrainingSet& t, const LossSpec& loss) {
  double r0 = 0.0;
  for (int i = 0; i < t.n(); ++i) r0 += loss.eval(t.ys(i), 0.0);
  r0 /= t.n();
  const double bound_sq = r0 / sol.lambda;
  if (sol.norm * sol.norm <= bound_sq) return;
  // the exact minimizer satisfies the bound; scale the tiny overshoot away
  double scale = std::sqrt(bound_sq / (sol.norm * sol.norm));
  for (int guard = 0; guard < 64 && sol.norm * sol.norm > bound_sq; ++guard) {
    sol.f.coeffs *= scale;
    sol.norm = rkhs_norm(sol.f);
    scale = 1.0 - 1e-15;
  }
  sol.objective = objective_value(sol.f, t, loss, sol.lambda);
}

}  // namespace

SvmSolution train(const TrainingSet& t, const LossSpec& loss, const KernelSpec& kernel,
                  double lambda, const TrainOptions& opts) {
  if (lambda <= 0.0) throw std::invalid_argument("train: lambda must be > 0");
  if (t.n() < 1) throw std::invalid_argument("train: empty training set");
  if (t.xs.rows() != t.ys.size())
    throw std::invalid_argument("train: xs/ys size mismatch");
  if (t.xs.cols() != kernel.input_dim())
    throw std::invalid_argument("train: kernel dimension mismatch");

  SvmSolution sol;
  if (loss.is_piecewise_linear()) {
    sol = solve_piecewise_linear(t, loss, kernel, lambda, opts);
  } else if (loss.kind() == LossKind::LeastSquares) {
    sol = solve_least_squares(t, loss, kernel, lambda, opts);
  } else {
    sol = solve_smooth(t, loss, kernel, lambda, opts);
  }
  clamp_norm_bound(sol, t, loss);
  return sol;
}

double objective_value(const RkhsFunction& f, const TrainingSet& t, const LossSpec& loss,
                       double lambda) {
  if (f.kernel.input_dim() != t.xs.cols())
    throw std::invalid_argument("objective_value: kernel dimension mismatch");
  const double norm = rkhs_norm(f);
  const Eigen::VectorXd fv = f.eval_many(t.xs);
  double risk = 0.0;
  for (int i = 0; i < t.n(); ++i) risk += loss.eval(t.ys(i), fv(i));
  risk /= t.n();
  return lambda * norm * norm + risk;
}

SvmSolution reference_solution(const ProcessSpec& spec, const LossSpec& loss,
                               const KernelSpec& kernel, double lambda, int m,
                               std::uint64_t seed, const TrainOptions& opts) {
  if (m < 1000)
    throw std::invalid_argument("reference_solution: m must be >= 1000");
  const TrainingSet ref = sample_stationary(spec, seed, m);
  return train(ref, loss, kernel, lambda, opts);
}

namespace {

// w^T K w for a combined expansion, chunked to bound memory
double quadratic_form(const KernelSpec& kernel, const Eigen::MatrixXd& pts,
                      const Eigen::VectorXd& w) {
  const Eigen::Index n = pts.rows();
  constexpr Eigen::Index chunk = 512;
  double acc = 0.0;
  for (Eigen::Index start = 0; start < n; start += chunk) {
    const Eigen::Index rows = std::min(chunk, n - start);
    const Eigen::MatrixXd block = kernel.cross_gram(pts.middleRows(start, rows), pts);
    acc += w.segment(start, rows).dot(block * w);
  }
  return std::max(0.0, acc);
}

}  // namespace

StabilityWitness stability_witness(const SvmSolution& f_ref, const TrainingSet& t,
                                   const TrainingSet& ref_sample, const LossSpec& loss,
                                   const KernelSpec& kernel, double lambda,
                                   const TrainOptions& opts, double slack) {
  if (f_ref.f.kernel != kernel)
    throw std::invalid_argument("stability_witness: kernel mismatch");
  const SvmSolution f_t = train(t, loss, kernel, lambda, opts);

  StabilityWitness w;
  w.lhs = rkhs_diff_norm(f_ref.f, f_t.f);

  const int n = t.n();
  const int m = ref_sample.n();
  Eigen::MatrixXd pts(m + n, t.xs.cols());
  pts.topRows(m) = ref_sample.xs;
  pts.bottomRows(n) = t.xs;

  const Eigen::VectorXd pred = f_ref.f.eval_many(pts);
  Eigen::VectorXd weights(m + n);
  double h_sup = 0.0;
  for (int j = 0; j < m; ++j) {
    const Interval s = loss.subgradient(ref_sample.ys(j), pred(j));
    const double h = 0.5 * (s.lo + s.hi);
    h_sup = std::max(h_sup, std::abs(h));
    weights(j) = h / m;
  }
  for (int i = 0; i < n; ++i) {
    const Interval s = loss.subgradient(t.ys(i), pred(m + i));
    const double h = 0.5 * (s.lo + s.hi);
    h_sup = std::max(h_sup, std::abs(h));
    weights(m + i) = -h / n;
  }
  w.rhs = std::sqrt(quadratic_form(kernel, pts, weights)) / lambda;
  w.h_sup = h_sup;

  // B_lambda from the sup norm of the kernel; unbounded kernels are bounded
  // over the observed points
  double k_sup;
  if (kernel.kind() == KernelKind::Gaussian) {
    k_sup = kernel.sup_norm();
  } else {
    double radius = 0.0;
    for (Eigen::Index i = 0; i < pts.rows(); ++i)
      radius = std::max(radius, pts.row(i).norm());
    k_sup = kernel.sup_norm(radius);
  }
  const double c0 = loss.sup_at_zero();
  const double b_lam = std::isinf(c0) ? std::numeric_limits<double>::infinity()
                                      : b_lambda(k_sup, c0, lambda);
  w.h_sup_bound = loss.local_lipschitz(std::max(b_lam, 1e-12));
  w.holds = w.lhs <= w.rhs + slack;
  return w;
}

}  // namespace depsvm
