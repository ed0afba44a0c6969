#include "depsvm/process.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "depsvm/rng.hpp"

namespace depsvm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double norm_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                            double fa, double fm, double fb, double whole, double tol,
                            int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(a, m, fa, flm, fm);
  const double right = simpson(m, b, fm, frm, fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-10) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol, 40);
}

double student_pdf(double v, int dof, double scale) {
  const double nu = static_cast<double>(dof);
  const double z = v / scale;
  const double lc = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                    0.5 * std::log(nu * M_PI);
  return std::exp(lc - 0.5 * (nu + 1.0) * std::log1p(z * z / nu)) / scale;
}

double noise_pdf(const NoiseSpec& noise, double v) {
  if (noise.kind == NoiseSpec::Kind::Gaussian)
    return norm_pdf(v / noise.scale) / noise.scale;
  return student_pdf(v, noise.dof, noise.scale);
}

double draw_noise(const NoiseSpec& noise, RandomStream& rng) {
  if (noise.kind == NoiseSpec::Kind::Gaussian) return noise.scale * rng.normal();
  return noise.scale * rng.student_t(noise.dof);
}

double draw_label(const LabelModel& label, double latent, RandomStream& rng) {
  if (const auto* c = std::get_if<ClassificationLabel>(&label)) {
    const double eta = c->tabular()
                           ? c->eta[static_cast<std::size_t>(latent)]
                           : c->eta_at(latent);
    return rng.bernoulli(eta) ? 1.0 : -1.0;
  }
  const auto& r = std::get<RegressionLabel>(label);
  return r.mean(latent) + draw_noise(r.noise, rng);
}

std::vector<double> row_probs(const Eigen::MatrixXd& m, int row) {
  std::vector<double> p(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) p[static_cast<std::size_t>(j)] = m(row, j);
  return p;
}

std::vector<double> vec_probs(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

// ---------------------------------------------------------------------------
// label model pieces
// ---------------------------------------------------------------------------

double MeanFunction::operator()(double x) const {
  switch (kind) {
    case Kind::Zero: return 0.0;
    case Kind::Linear: return a * (b * x);
    case Kind::Sine: return a * std::sin(b * x);
    case Kind::Tanh: return a * std::tanh(b * x);
  }
  return 0.0;
}

MeanFunction MeanFunction::from_name(const std::string& name, double a, double b) {
  MeanFunction m;
  m.a = a;
  m.b = b;
  if (name == "zero") m.kind = Kind::Zero;
  else if (name == "linear") m.kind = Kind::Linear;
  else if (name == "sine") m.kind = Kind::Sine;
  else if (name == "tanh") m.kind = Kind::Tanh;
  else throw std::invalid_argument("unknown mean function: " + name);
  return m;
}

std::string MeanFunction::name() const {
  switch (kind) {
    case Kind::Zero: return "zero";
    case Kind::Linear: return "linear";
    case Kind::Sine: return "sine";
    case Kind::Tanh: return "tanh";
  }
  return "?";
}

double NoiseSpec::variance() const {
  if (kind == Kind::Gaussian) return scale * scale;
  if (dof <= 2) return kInf;
  return scale * scale * dof / (dof - 2.0);
}

std::string NoiseSpec::name() const {
  return kind == Kind::Gaussian ? "gaussian" : "student_t";
}

// ---------------------------------------------------------------------------
// ProcessSpec
// ---------------------------------------------------------------------------

int ProcessSpec::input_dim() const {
  if (const auto* iid = std::get_if<IidSpec>(&variant)) {
    if (const auto* box = std::get_if<UniformBox>(&iid->x_dist))
      return static_cast<int>(box->lo.size());
    return 1;
  }
  if (const auto* mc = std::get_if<MarkovChainSpec>(&variant))
    return static_cast<int>(mc->features.cols());
  return 1;
}

const LabelModel& ProcessSpec::label() const {
  return std::visit([](const auto& v) -> const LabelModel& { return v.label; }, variant);
}

const MarkovChainSpec* ProcessSpec::chain() const {
  return std::get_if<MarkovChainSpec>(&variant);
}

bool ProcessSpec::classification() const {
  return std::holds_alternative<ClassificationLabel>(label());
}

bool ProcessSpec::finite_classification() const {
  return chain() != nullptr && classification();
}

std::string ProcessSpec::name() const {
  if (std::holds_alternative<IidSpec>(variant)) return "iid";
  if (std::holds_alternative<MarkovChainSpec>(variant)) return "markov_chain";
  if (std::holds_alternative<Ar1Spec>(variant)) return "ar1";
  return "noisy_doubling";
}

void ProcessSpec::validate() const {
  const auto check_label = [](const LabelModel& label) {
    if (const auto* c = std::get_if<ClassificationLabel>(&label)) {
      for (double e : c->eta)
        if (e < 0.0 || e > 1.0)
          throw std::invalid_argument("process.label.eta: entries must lie in [0,1]");
      if (!c->tabular()) {
        if (c->p_left < 0.0 || c->p_left > 1.0 || c->p_right < 0.0 || c->p_right > 1.0)
          throw std::invalid_argument("process.label.p_left/p_right: must lie in [0,1]");
      }
    } else {
      const auto& r = std::get<RegressionLabel>(label);
      if (r.noise.scale <= 0.0)
        throw std::invalid_argument("process.label.noise_scale: must be > 0");
      if (r.noise.q < 1.0)
        throw std::invalid_argument("process.label.q: declared moment order must be >= 1");
      if (r.noise.kind == NoiseSpec::Kind::StudentT) {
        if (r.noise.dof < 1)
          throw std::invalid_argument("process.label.dof: must be >= 1");
        if (r.noise.q >= r.noise.dof)
          throw std::invalid_argument(
              "process.label.q: declared moment order must be < StudentT dof");
      }
    }
  };

  if (const auto* mc = std::get_if<MarkovChainSpec>(&variant)) {
    const int m = mc->states();
    if (m < 1 || mc->trans.cols() != m)
      throw std::invalid_argument("process.trans: must be a square matrix");
    if (m > 20)
      throw std::invalid_argument("process.trans: at most 20 states supported");
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      for (int j = 0; j < m; ++j) {
        if (mc->trans(i, j) < 0.0)
          throw std::invalid_argument("process.trans: negative entry");
        s += mc->trans(i, j);
      }
      if (std::abs(s - 1.0) > 1e-12)
        throw std::invalid_argument("process.trans: row " + std::to_string(i) +
                                    " does not sum to 1");
    }
    if (mc->init.size() != m)
      throw std::invalid_argument("process.init: size mismatch with trans");
    double s = 0.0;
    for (int i = 0; i < m; ++i) {
      if (mc->init(i) < 0.0) throw std::invalid_argument("process.init: negative entry");
      s += mc->init(i);
    }
    if (std::abs(s - 1.0) > 1e-12)
      throw std::invalid_argument("process.init: does not sum to 1");
    if (mc->features.rows() != m)
      throw std::invalid_argument("process.features: need one row per state");
    if (const auto* c = std::get_if<ClassificationLabel>(&mc->label)) {
      if (c->tabular() && static_cast<int>(c->eta.size()) != m)
        throw std::invalid_argument("process.label.eta: need one entry per state");
    }
    check_label(mc->label);
  } else if (const auto* ar = std::get_if<Ar1Spec>(&variant)) {
    if (std::abs(ar->rho) >= 1.0)
      throw std::invalid_argument("process.rho: must satisfy |rho| < 1");
    if (ar->noise_sd <= 0.0)
      throw std::invalid_argument("process.noise_sd: must be > 0");
    check_label(ar->label);
  } else if (const auto* nd = std::get_if<NoisyDoublingSpec>(&variant)) {
    if (nd->noise_sd <= 0.0)
      throw std::invalid_argument("process.noise_sd: must be > 0");
    check_label(nd->label);
  } else {
    const auto& iid = std::get<IidSpec>(variant);
    if (const auto* box = std::get_if<UniformBox>(&iid.x_dist)) {
      if (box->lo.size() != box->hi.size() || box->lo.size() < 1)
        throw std::invalid_argument("process.box: lo/hi size mismatch");
      for (Eigen::Index i = 0; i < box->lo.size(); ++i)
        if (box->lo(i) >= box->hi(i))
          throw std::invalid_argument("process.box: lo must be < hi");
    } else {
      const auto& gm = std::get<GaussianMixture1d>(iid.x_dist);
      if (gm.weights.empty() || gm.weights.size() != gm.means.size() ||
          gm.weights.size() != gm.sds.size())
        throw std::invalid_argument("process.mixture: component size mismatch");
      for (double w : gm.weights)
        if (w < 0.0) throw std::invalid_argument("process.mixture: negative weight");
      for (double s : gm.sds)
        if (s <= 0.0) throw std::invalid_argument("process.mixture: sd must be > 0");
    }
    check_label(iid.label);
  }
}

// ---------------------------------------------------------------------------
// sampling
// ---------------------------------------------------------------------------

TrainingSet sample_path(const ProcessSpec& spec, std::uint64_t seed, int n) {
  if (n < 1) throw std::invalid_argument("sample_path: n must be >= 1");
  RandomStream rng(seed, 0);
  const int d = spec.input_dim();
  TrainingSet out;
  out.xs.resize(n, d);
  out.ys.resize(n);

  if (const auto* mc = spec.chain()) {
    int s = rng.categorical(vec_probs(mc->init));
    for (int i = 0; i < n; ++i) {
      if (i > 0) s = rng.categorical(row_probs(mc->trans, s));
      out.xs.row(i) = mc->features.row(s);
      const double latent = std::holds_alternative<ClassificationLabel>(mc->label) &&
                                    std::get<ClassificationLabel>(mc->label).tabular()
                                ? static_cast<double>(s)
                                : mc->features(s, 0);
      out.ys(i) = draw_label(mc->label, latent, rng);
    }
  } else if (const auto* ar = std::get_if<Ar1Spec>(&spec.variant)) {
    double x = rng.normal(0.0, ar->noise_sd);
    for (int i = 0; i < n; ++i) {
      if (i > 0) x = ar->rho * x + rng.normal(0.0, ar->noise_sd);
      out.xs(i, 0) = x;
      out.ys(i) = draw_label(ar->label, x, rng);
    }
  } else if (const auto* nd = std::get_if<NoisyDoublingSpec>(&spec.variant)) {
    std::uint64_t window = rng.next_u64();
    for (int i = 0; i < n; ++i) {
      const double z = static_cast<double>(window >> 11) * 0x1.0p-53;  // exact, in [0,1)
      out.xs(i, 0) = z + nd->noise_sd * rng.normal();
      out.ys(i) = draw_label(nd->label, z, rng);
      window = (window << 1) | (rng.next_u64() >> 63);
    }
  } else {
    const auto& iid = std::get<IidSpec>(spec.variant);
    for (int i = 0; i < n; ++i) {
      if (const auto* box = std::get_if<UniformBox>(&iid.x_dist)) {
        for (int j = 0; j < d; ++j) out.xs(i, j) = rng.uniform(box->lo(j), box->hi(j));
      } else {
        const auto& gm = std::get<GaussianMixture1d>(iid.x_dist);
        const int c = rng.categorical(gm.weights);
        out.xs(i, 0) = rng.normal(gm.means[static_cast<std::size_t>(c)],
                                  gm.sds[static_cast<std::size_t>(c)]);
      }
      out.ys(i) = draw_label(iid.label, out.xs(i, 0), rng);
    }
  }
  return out;
}

StationaryMean stationary_mean(const ProcessSpec& spec) {
  StationaryMean sm;
  if (const auto* mc = spec.chain()) {
    sm.form = StationaryMean::Form::FiniteStates;
    sm.pi = cesaro_limit(*mc);
  } else if (const auto* ar = std::get_if<Ar1Spec>(&spec.variant)) {
    sm.form = StationaryMean::Form::GaussianMarginal;
    sm.mean = 0.0;
    sm.sd = ar->noise_sd / std::sqrt(1.0 - ar->rho * ar->rho);
  } else if (const auto* nd = std::get_if<NoisyDoublingSpec>(&spec.variant)) {
    sm.form = StationaryMean::Form::UniformWithNoise;
    sm.noise_sd = nd->noise_sd;
  } else {
    sm.form = StationaryMean::Form::IidLaw;
  }
  return sm;
}

TrainingSet sample_stationary(const ProcessSpec& spec, std::uint64_t seed, int m) {
  if (m < 1) throw std::invalid_argument("sample_stationary: m must be >= 1");
  RandomStream rng(seed, 1);
  const int d = spec.input_dim();
  TrainingSet out;
  out.xs.resize(m, d);
  out.ys.resize(m);

  if (const auto* mc = spec.chain()) {
    const std::vector<double> pi = vec_probs(cesaro_limit(*mc));
    for (int i = 0; i < m; ++i) {
      const int s = rng.categorical(pi);
      out.xs.row(i) = mc->features.row(s);
      const double latent = std::holds_alternative<ClassificationLabel>(mc->label) &&
                                    std::get<ClassificationLabel>(mc->label).tabular()
                                ? static_cast<double>(s)
                                : mc->features(s, 0);
      out.ys(i) = draw_label(mc->label, latent, rng);
    }
    return out;
  }
  if (const auto* ar = std::get_if<Ar1Spec>(&spec.variant)) {
    const double sd = ar->noise_sd / std::sqrt(1.0 - ar->rho * ar->rho);
    for (int i = 0; i < m; ++i) {
      const double x = rng.normal(0.0, sd);
      out.xs(i, 0) = x;
      out.ys(i) = draw_label(ar->label, x, rng);
    }
    return out;
  }
  if (const auto* nd = std::get_if<NoisyDoublingSpec>(&spec.variant)) {
    for (int i = 0; i < m; ++i) {
      const double z = rng.uniform01();
      out.xs(i, 0) = z + nd->noise_sd * rng.normal();
      out.ys(i) = draw_label(nd->label, z, rng);
    }
    return out;
  }
  // i.i.d. variant: the path law already is the stationary mean
  const auto& iid = std::get<IidSpec>(spec.variant);
  for (int i = 0; i < m; ++i) {
    if (const auto* box = std::get_if<UniformBox>(&iid.x_dist)) {
      for (int j = 0; j < d; ++j) out.xs(i, j) = rng.uniform(box->lo(j), box->hi(j));
    } else {
      const auto& gm = std::get<GaussianMixture1d>(iid.x_dist);
      const int c = rng.categorical(gm.weights);
      out.xs(i, 0) = rng.normal(gm.means[static_cast<std::size_t>(c)],
                                gm.sds[static_cast<std::size_t>(c)]);
    }
    out.ys(i) = draw_label(iid.label, out.xs(i, 0), rng);
  }
  return out;
}

// ---------------------------------------------------------------------------
// chain analysis
// ---------------------------------------------------------------------------

Eigen::VectorXd cesaro_average(const MarkovChainSpec& chain, int n) {
  if (n < 1) throw std::invalid_argument("cesaro_average: n must be >= 1");
  Eigen::VectorXd p = chain.init;
  Eigen::VectorXd acc = p;
  for (int i = 1; i < n; ++i) {
    p = chain.trans.transpose() * p;
    acc += p;
  }
  return acc / static_cast<double>(n);
}

Eigen::VectorXd cesaro_limit(const MarkovChainSpec& chain) {
  const Eigen::MatrixXd& t = chain.trans;
  const int m = chain.states();
  Eigen::RowVectorXd nu = chain.init.transpose();
  if ((nu * t - nu).cwiseAbs().maxCoeff() < 1e-14) return chain.init;

  // A_k = (1/2^k) sum_{i<2^k} T^i via A_{k+1} = (A_k + T^{2^k} A_k)/2;
  // the transient and peripheral oscillation both average out at O(1/2^k)
  Eigen::MatrixXd avg = Eigen::MatrixXd::Identity(m, m);
  Eigen::MatrixXd power = t;
  for (int k = 0; k < 64; ++k) {
    const Eigen::MatrixXd next = 0.5 * (avg + power * avg);
    const double delta = (next - avg).cwiseAbs().maxCoeff();
    avg = next;
    if (delta < 1e-16) break;
    power = power * power;
  }
  Eigen::VectorXd pi = (nu * avg).transpose();
  pi = pi.cwiseMax(0.0);
  pi /= pi.sum();
  return pi;
}

bool has_positive_power(const MarkovChainSpec& chain, int cap) {
  Eigen::MatrixXd b = (chain.trans.array() > 0.0).cast<double>();
  Eigen::MatrixXd c = b;
  for (int k = 1; k <= cap; ++k) {
    if ((c.array() > 0.0).all()) return true;
    c = ((c * b).array() > 0.0).cast<double>();
  }
  return false;
}

// ---------------------------------------------------------------------------
// risks
// ---------------------------------------------------------------------------

double inner_bayes_risk(const LossSpec& loss, double eta) {
  if (eta < 0.0 || eta > 1.0)
    throw std::invalid_argument("inner_bayes_risk: eta must lie in [0,1]");
  switch (loss.kind()) {
    case LossKind::Hinge:
    case LossKind::AbsoluteDistance:
      return 2.0 * std::min(eta, 1.0 - eta);
    case LossKind::SquaredHinge:
    case LossKind::LeastSquares:
      return 4.0 * eta * (1.0 - eta);
    case LossKind::LogisticMargin: {
      double h = 0.0;
      if (eta > 0.0) h -= eta * std::log(eta);
      if (eta < 1.0) h -= (1.0 - eta) * std::log(1.0 - eta);
      return h;
    }
    default: {
      // golden-section on the convex inner risk; minimizer lies in [-1, 1]
      const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
      auto c_risk = [&](double t) {
        return eta * loss.eval(1.0, t) + (1.0 - eta) * loss.eval(-1.0, t);
      };
      double a = -1.0, b = 1.0;
      double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
      double f1 = c_risk(x1), f2 = c_risk(x2);
      for (int it = 0; it < 200 && (b - a) > 1e-12; ++it) {
        if (f1 <= f2) {
          b = x2; x2 = x1; f2 = f1;
          x1 = b - gr * (b - a); f1 = c_risk(x1);
        } else {
          a = x1; x1 = x2; f1 = f2;
          x2 = a + gr * (b - a); f2 = c_risk(x2);
        }
      }
      return c_risk(0.5 * (a + b));
    }
  }
}

double irreducible_regression_risk(const LossSpec& loss, const NoiseSpec& noise) {
  if (loss.family() != LossFamily::DistanceBased)
    throw std::invalid_argument("irreducible_regression_risk: loss must be distance-based");
  if (loss.kind() == LossKind::LeastSquares) return noise.variance();
  // symmetric noise and symmetric convex psi: the inner minimizer is the
  // conditional mean, leaving E psi(noise)
  const double w = noise.kind == NoiseSpec::Kind::Gaussian ? 12.0 * noise.scale
                                                           : 400.0 * noise.scale;
  auto f = [&](double v) { return loss.eval(v, 0.0) * noise_pdf(noise, v); };
  return 2.0 * integrate(f, 0.0, w, 1e-11);
}

namespace {

// eta per state, whichever label-profile form the chain uses
double chain_eta(const MarkovChainSpec& mc, const ClassificationLabel& c, int s) {
  return c.tabular() ? c.eta[static_cast<std::size_t>(s)] : c.eta_at(mc.features(s, 0));
}

double classification_bayes(const ProcessSpec& spec, const LossSpec& loss) {
  const auto& c = std::get<ClassificationLabel>(spec.label());
  if (const auto* mc = spec.chain()) {
    const Eigen::VectorXd pi = cesaro_limit(*mc);
    double acc = 0.0;
    for (int s = 0; s < mc->states(); ++s)
      acc += pi(s) * inner_bayes_risk(loss, chain_eta(*mc, c, s));
    return acc;
  }
  if (const auto* nd = std::get_if<NoisyDoublingSpec>(&spec.variant)) {
    // labels attach to the hidden state; the conditional eta given the noisy
    // observation has no closed form, so integrate over x numerically
    const double sd = nd->noise_sd;
    auto band = [&](double x, double a, double b) {
      return norm_cdf((x - a) / sd) - norm_cdf((x - b) / sd);
    };
    auto integrand = [&](double x) {
      const double thr = std::clamp(c.threshold, 0.0, 1.0);
      const double num = c.p_left * band(x, 0.0, thr) + c.p_right * band(x, thr, 1.0);
      const double den = band(x, 0.0, 1.0);
      if (den <= 1e-300) return 0.0;
      return den * inner_bayes_risk(loss, std::clamp(num / den, 0.0, 1.0));
    };
    return integrate(integrand, -8.0 * sd, 1.0 + 8.0 * sd, 1e-9);
  }
  // threshold profile over a continuous marginal: two-point mixture of
  // inner risks weighted by P(x < threshold)
  double p_below = 0.0;
  if (const auto* ar = std::get_if<Ar1Spec>(&spec.variant)) {
    const double sd = ar->noise_sd / std::sqrt(1.0 - ar->rho * ar->rho);
    p_below = norm_cdf(c.threshold / sd);
  } else {
    const auto& iid = std::get<IidSpec>(spec.variant);
    if (const auto* box = std::get_if<UniformBox>(&iid.x_dist)) {
      p_below = std::clamp((c.threshold - box->lo(0)) / (box->hi(0) - box->lo(0)), 0.0, 1.0);
    } else {
      const auto& gm = std::get<GaussianMixture1d>(iid.x_dist);
      double total = 0.0, below = 0.0;
      for (std::size_t i = 0; i < gm.weights.size(); ++i) {
        total += gm.weights[i];
        below += gm.weights[i] * norm_cdf((c.threshold - gm.means[i]) / gm.sds[i]);
      }
      p_below = below / total;
    }
  }
  return p_below * inner_bayes_risk(loss, c.p_left) +
         (1.0 - p_below) * inner_bayes_risk(loss, c.p_right);
}

}  // namespace

double bayes_risk(const ProcessSpec& spec, const LossSpec& loss) {
  if (spec.classification()) return classification_bayes(spec, loss);
  if (loss.family() != LossFamily::DistanceBased)
    throw std::invalid_argument("bayes_risk: margin loss with a regression label model");
  const auto& r = std::get<RegressionLabel>(spec.label());
  return irreducible_regression_risk(loss, r.noise);
}

// ---------------------------------------------------------------------------
// laws of large numbers
// ---------------------------------------------------------------------------

double stationary_expectation(const ProcessSpec& spec,
                              const std::function<double(const Eigen::VectorXd&, double)>& f) {
  if (const auto* mc = spec.chain()) {
    const Eigen::VectorXd pi = cesaro_limit(*mc);
    if (const auto* c = std::get_if<ClassificationLabel>(&mc->label)) {
      double acc = 0.0;
      for (int s = 0; s < mc->states(); ++s) {
        const Eigen::VectorXd x = mc->features.row(s).transpose();
        const double eta = chain_eta(*mc, *c, s);
        acc += pi(s) * (eta * f(x, 1.0) + (1.0 - eta) * f(x, -1.0));
      }
      return acc;
    }
    const auto& r = std::get<RegressionLabel>(mc->label);
    double acc = 0.0;
    const double w = r.noise.kind == NoiseSpec::Kind::Gaussian ? 12.0 * r.noise.scale
                                                               : 400.0 * r.noise.scale;
    for (int s = 0; s < mc->states(); ++s) {
      const Eigen::VectorXd x = mc->features.row(s).transpose();
      const double m = r.mean(x(0));
      acc += pi(s) * integrate(
                         [&](double v) { return f(x, m + v) * noise_pdf(r.noise, v); },
                         -w, w, 1e-10);
    }
    return acc;
  }
  // continuous stationary mean: fixed-seed Monte Carlo reference
  constexpr int kRefSamples = 200000;
  const TrainingSet ref = sample_stationary(spec, 0x5e11aDULL, kRefSamples);
  double acc = 0.0;
  for (int i = 0; i < ref.n(); ++i) acc += f(ref.xs.row(i).transpose(), ref.ys(i));
  return acc / ref.n();
}

double median_of(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median_of: empty");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

LlnTable lln_diagnostic(const ProcessSpec& spec,
                        const std::function<double(const Eigen::VectorXd&, double)>& f,
                        const std::vector<int>& n_grid,
                        const std::vector<std::uint64_t>& seeds,
                        std::optional<double> expectation) {
  if (n_grid.empty() || seeds.empty())
    throw std::invalid_argument("lln_diagnostic: empty grid or seeds");
  for (std::size_t i = 1; i < n_grid.size(); ++i)
    if (n_grid[i] <= n_grid[i - 1])
      throw std::invalid_argument("lln_diagnostic: n_grid must be ascending");

  LlnTable table;
  table.n_grid = n_grid;
  table.expectation = expectation ? *expectation : stationary_expectation(spec, f);
  const int max_n = n_grid.back();

  std::vector<std::vector<double>> devs(n_grid.size());
  for (std::uint64_t seed : seeds) {
    const TrainingSet path = sample_path(spec, seed, max_n);
    double acc = 0.0;
    std::size_t gi = 0;
    for (int i = 0; i < max_n && gi < n_grid.size(); ++i) {
      acc += f(path.xs.row(i).transpose(), path.ys(i));
      if (i + 1 == n_grid[gi]) {
        devs[gi].push_back(std::abs(acc / (i + 1) - table.expectation));
        ++gi;
      }
    }
  }
  for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
    for (std::size_t si = 0; si < seeds.size(); ++si)
      table.rows.push_back({n_grid[gi], seeds[si], devs[gi][si]});
    table.median_by_n.push_back(median_of(devs[gi]));
  }
  return table;
}

}  // namespace depsvm
