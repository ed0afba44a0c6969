#include <doctest.h>

#include <cmath>

#include "depsvm/mixing.hpp"
#include "depsvm/rng.hpp"

using namespace depsvm;

namespace {

FiniteJoint product_joint(const Eigen::VectorXd& r, const Eigen::VectorXd& c) {
  return FiniteJoint(r * c.transpose());
}

MarkovChainSpec symmetric_chain(double stay, const Eigen::VectorXd& init) {
  MarkovChainSpec mc;
  mc.trans.resize(2, 2);
  mc.trans << stay, 1.0 - stay, 1.0 - stay, stay;
  mc.init = init;
  mc.features.resize(2, 1);
  mc.features << -1.0, 1.0;
  ClassificationLabel lbl;
  lbl.eta = {0.8, 0.2};
  mc.label = lbl;
  return mc;
}

Eigen::VectorXd uniform2() {
  Eigen::VectorXd v(2);
  v << 0.5, 0.5;
  return v;
}

FiniteJoint random_joint(RandomStream& rng, int rows, int cols) {
  Eigen::MatrixXd p(rows, cols);
  double total = 0.0;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      double v = rng.uniform01();
      if (rng.uniform01() < 0.2) v = 0.0;  // exercise zero cells and marginals
      p(i, j) = v;
      total += v;
    }
  if (total == 0.0) p(0, 0) = total = 1.0;
  return FiniteJoint(p / p.sum());
}

// independent route: direct enumeration over all event pairs
double alpha_pair_enumeration(const FiniteJoint& joint) {
  const int m = joint.rows(), mp = joint.cols();
  const Eigen::VectorXd r = joint.row_marginal(), c = joint.col_marginal();
  double best = 0.0;
  for (unsigned a = 0; a < (1u << m); ++a)
    for (unsigned b = 0; b < (1u << mp); ++b) {
      double pab = 0.0, pa = 0.0, pb = 0.0;
      for (int i = 0; i < m; ++i)
        if (a & (1u << i)) pa += r(i);
      for (int j = 0; j < mp; ++j)
        if (b & (1u << j)) pb += c(j);
      for (int i = 0; i < m; ++i)
        if (a & (1u << i))
          for (int j = 0; j < mp; ++j)
            if (b & (1u << j)) pab += joint.probs()(i, j);
      best = std::max(best, std::abs(pab - pa * pb));
    }
  return best;
}

// randomized single-flip hill climbing over event pairs
double alpha_hill_climb(const FiniteJoint& joint, RandomStream& rng, int restarts) {
  const int m = joint.rows(), mp = joint.cols();
  auto value = [&](unsigned a, unsigned b) {
    double pab = 0.0, pa = 0.0, pb = 0.0;
    const Eigen::VectorXd r = joint.row_marginal(), c = joint.col_marginal();
    for (int i = 0; i < m; ++i)
      if (a & (1u << i)) pa += r(i);
    for (int j = 0; j < mp; ++j)
      if (b & (1u << j)) pb += c(j);
    for (int i = 0; i < m; ++i)
      if (a & (1u << i))
        for (int j = 0; j < mp; ++j)
          if (b & (1u << j)) pab += joint.probs()(i, j);
    return std::abs(pab - pa * pb);
  };
  double best = 0.0;
  for (int restart = 0; restart < restarts; ++restart) {
    unsigned a = static_cast<unsigned>(rng.next_u64()) & ((1u << m) - 1);
    unsigned b = static_cast<unsigned>(rng.next_u64()) & ((1u << mp) - 1);
    double cur = value(a, b);
    bool improved = true;
    while (improved) {
      improved = false;
      for (int i = 0; i < m + mp; ++i) {
        const unsigned na = i < m ? a ^ (1u << i) : a;
        const unsigned nb = i < m ? b : b ^ (1u << (i - m));
        const double v = value(na, nb);
        if (v > cur + 1e-15) {
          a = na;
          b = nb;
          cur = v;
          improved = true;
        }
      }
    }
    best = std::max(best, cur);
  }
  return best;
}

// brute-force maximal correlation for binary pairs: all +-1 label pairs
double r2_binary_bruteforce(const FiniteJoint& joint) {
  REQUIRE(joint.rows() == 2);
  REQUIRE(joint.cols() == 2);
  const Eigen::VectorXd r = joint.row_marginal(), c = joint.col_marginal();
  double best = 0.0;
  for (int sa = 0; sa < 2; ++sa)
    for (int sb = 0; sb < 2; ++sb) {
      // f in {+-1} on rows, g in {+-1} on cols, modulo sign there is one shape
      Eigen::Vector2d f(sa == 0 ? 1.0 : -1.0, sa == 0 ? -1.0 : 1.0);
      Eigen::Vector2d g(sb == 0 ? 1.0 : -1.0, sb == 0 ? -1.0 : 1.0);
      const double ef = f.dot(r), eg = g.dot(c);
      const double vf = 1.0 - ef * ef, vg = 1.0 - eg * eg;
      if (vf <= 0.0 || vg <= 0.0) continue;
      double efg = 0.0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) efg += joint.probs()(i, j) * f(i) * g(j);
      best = std::max(best, std::abs(efg - ef * eg) / std::sqrt(vf * vg));
    }
  return best;
}

}  // namespace

TEST_CASE("joint table validation") {
  auto make = [](double a, double b, double c, double d) {
    Eigen::MatrixXd m(2, 2);
    m << a, b, c, d;
    return FiniteJoint(m);
  };
  CHECK_THROWS_AS(make(0.5, 0.5, 0.5, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(make(-0.1, 0.6, 0.3, 0.2), std::invalid_argument);
}

TEST_CASE("independent joints have zero coefficients") {
  Eigen::VectorXd r(3), c(2);
  r << 0.2, 0.5, 0.3;
  c << 0.6, 0.4;
  const FiniteJoint joint = product_joint(r, c);
  CHECK(alpha_coefficient(joint) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(beta_coefficient(joint) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(phi_coefficient(joint) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(r2_coefficient(joint) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(rio_bound(0.0, 0.0, 3.0) == doctest::Approx(0.0));
}

TEST_CASE("two-state chain coefficients at lag 1") {
  const MarkovChainSpec mc = symmetric_chain(0.9, uniform2());
  const FiniteJoint joint = markov_lag_joint(mc, 1, 2);
  // joint is 0.25 * [[1.8, 0.2], [0.2, 1.8]]
  CHECK(joint.probs()(0, 0) == doctest::Approx(0.45).epsilon(1e-14));
  CHECK(joint.probs()(0, 1) == doctest::Approx(0.05).epsilon(1e-14));

  CHECK(alpha_coefficient(joint) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(beta_coefficient(joint) == doctest::Approx(0.4).epsilon(1e-12));
  // sup of |P(B|A) - P(B)| over the four nontrivial events: 0.9 - 0.5
  CHECK(phi_coefficient(joint) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(phi_sym_coefficient(joint) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(r2_coefficient(joint) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(r2_binary_bruteforce(joint) == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("two-state chain decay over lags") {
  const MarkovChainSpec mc = symmetric_chain(0.9, uniform2());
  for (int lag = 1; lag <= 10; ++lag) {
    const FiniteJoint joint = markov_lag_joint(mc, 1, 1 + lag);
    const double decay = std::pow(0.8, lag);
    CHECK(alpha_coefficient(joint) == doctest::Approx(0.25 * decay).epsilon(1e-10));
    CHECK(beta_coefficient(joint) == doctest::Approx(0.5 * decay).epsilon(1e-10));
    CHECK(phi_coefficient(joint) == doctest::Approx(0.5 * decay).epsilon(1e-10));
    CHECK(r2_coefficient(joint) == doctest::Approx(decay).epsilon(1e-10));
  }
}

TEST_CASE("perfectly coupled binary pair") {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(2, 2);
  p(0, 0) = 0.5;
  p(1, 1) = 0.5;
  const FiniteJoint joint(p);
  CHECK(alpha_coefficient(joint) == doctest::Approx(0.25));
  CHECK(beta_coefficient(joint) == doctest::Approx(0.5));
  CHECK(phi_coefficient(joint) == doctest::Approx(0.5));
  CHECK(r2_coefficient(joint) == doctest::Approx(1.0));
}

TEST_CASE("lag joints: stationarity and exclusions") {
  const MarkovChainSpec mc = symmetric_chain(0.9, uniform2());
  CHECK_THROWS_AS(markov_lag_joint(mc, 3, 3), std::invalid_argument);

  const FiniteJoint a = markov_lag_joint(mc, 1, 3);
  const FiniteJoint b = markov_lag_joint(mc, 4, 6);
  const FiniteJoint c = markov_lag_joint(mc, 6, 4);
  CHECK((a.probs() - b.probs()).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((a.probs() - c.probs()).cwiseAbs().maxCoeff() <= 1e-14);

  // trans^2 = [[0.82, 0.18], [0.18, 0.82]]
  CHECK(a.probs()(0, 0) == doctest::Approx(0.25 * 1.64).epsilon(1e-14));
  CHECK(a.probs()(0, 1) == doctest::Approx(0.25 * 0.36).epsilon(1e-14));
}

TEST_CASE("bi-mixing averages") {
  // rows identical: every lag joint factorizes
  MarkovChainSpec iid = symmetric_chain(0.9, uniform2());
  iid.trans << 0.3, 0.7, 0.3, 0.7;
  iid.init << 0.3, 0.7;
  for (int n : {1, 5, 20})
    CHECK(bi_mixing_average(iid, n, MixCoefficient::Alpha) ==
          doctest::Approx(0.0).epsilon(1e-13));

  // stationary chain: the direct double sum equals the lag shortcut
  const MarkovChainSpec mc = symmetric_chain(0.9, uniform2());
  for (int n : {10, 100}) {
    const double direct = bi_mixing_average_direct(mc, n, MixCoefficient::Alpha);
    const double shortcut = bi_mixing_average(mc, n, MixCoefficient::Alpha);
    CHECK(std::abs(direct - shortcut) <= 1e-12);
  }

  // geometric alpha decay gives an O(1/n) average
  CHECK(bi_mixing_average(mc, 100, MixCoefficient::Alpha) <= 1.25 / 100.0);

  // non-stationary start is handled by the direct route
  Eigen::VectorXd delta0(2);
  delta0 << 1.0, 0.0;
  const MarkovChainSpec ns = symmetric_chain(0.9, delta0);
  CHECK(bi_mixing_average(ns, 30, MixCoefficient::Alpha) ==
        doctest::Approx(bi_mixing_average_direct(ns, 30, MixCoefficient::Alpha)));
}

TEST_CASE("rio bound") {
  CHECK_THROWS_AS(rio_bound(0.1, 0.5, 1.5), std::invalid_argument);
  CHECK(rio_bound(0.2, 0.4, 2.0) == doctest::Approx(2.0 * M_PI * 0.4));
  // p = 4 on the lag-1 chain coefficients
  CHECK(rio_bound(0.2, 0.4, 4.0) ==
        doctest::Approx(2.0 * M_PI * std::sqrt(0.2) * std::sqrt(0.4)));
}

TEST_CASE("empirical alpha") {
  CHECK_THROWS_AS(empirical_alpha({0, 1}, 1, 16), std::invalid_argument);

  // i.i.d. uniform states
  RandomStream rng(99);
  std::vector<int> path(100000);
  for (int& s : path) s = static_cast<int>(rng.next_u64() % 3);
  CHECK(empirical_alpha(path, 1, 16) <= 0.02);

  // long chain path reproduces the analytic lag-1 alpha
  const MarkovChainSpec mc = symmetric_chain(0.9, uniform2());
  ProcessSpec spec;
  spec.variant = mc;
  const TrainingSet long_path = sample_path(spec, 1234, 1000000);
  std::vector<int> states(static_cast<std::size_t>(long_path.n()));
  for (int i = 0; i < long_path.n(); ++i)
    states[static_cast<std::size_t>(i)] = long_path.xs(i, 0) > 0.0 ? 1 : 0;
  CHECK(empirical_alpha(states, 1, 16) == doctest::Approx(0.2).epsilon(0.05));
}

TEST_CASE("alphabet caps are enforced") {
  Eigen::MatrixXd p = Eigen::MatrixXd::Constant(17, 2, 1.0 / 34.0);
  CHECK_THROWS_AS(phi_coefficient(FiniteJoint(p)), std::invalid_argument);
  CHECK_THROWS_AS(alpha_coefficient(FiniteJoint(p)), std::invalid_argument);
  Eigen::MatrixXd ok = Eigen::MatrixXd::Constant(16, 2, 1.0 / 32.0);
  CHECK_NOTHROW(alpha_coefficient(FiniteJoint(ok)));
}

TEST_CASE("inequality chain on random joints") {
  RandomStream rng(4242);
  for (int trial = 0; trial < 1000; ++trial) {
    const int m = 2 + static_cast<int>(rng.next_u64() % 5);
    const int mp = 2 + static_cast<int>(rng.next_u64() % 5);
    const FiniteJoint joint = random_joint(rng, m, mp);
    const MixingReport rep = mixing_report(joint, 1);

    CHECK(rep.alpha >= -1e-10);
    CHECK(rep.alpha <= 0.25 + 1e-10);
    CHECK(rep.beta <= 1.0 + 1e-10);
    CHECK(rep.phi_row <= 1.0 + 1e-10);
    CHECK(rep.phi_col <= 1.0 + 1e-10);
    CHECK(rep.r2 <= 1.0 + 1e-10);

    CHECK(2.0 * rep.alpha <= rep.beta + 1e-10);
    CHECK(rep.beta <= std::min(rep.phi_row, rep.phi_col) + 1e-10);
    CHECK(4.0 * rep.alpha <= rep.r2 + 1e-10);
    CHECK(rep.r2 <= 2.0 * rep.phi_sym + 1e-10);
    CHECK(rep.r2 <= std::min(1.0, rep.rio_bound_p2) + 1e-10);

    // symmetry of alpha and beta; phi need not be symmetric
    const FiniteJoint t = joint.transposed();
    CHECK(alpha_coefficient(t) == doctest::Approx(rep.alpha).epsilon(1e-12));
    CHECK(beta_coefficient(t) == doctest::Approx(rep.beta).epsilon(1e-12));
  }
}

TEST_CASE("alpha enumeration agrees with independent oracles") {
  RandomStream rng(777);
  for (int trial = 0; trial < 60; ++trial) {
    const int m = 2 + static_cast<int>(rng.next_u64() % 5);
    const int mp = 2 + static_cast<int>(rng.next_u64() % 5);
    const FiniteJoint joint = random_joint(rng, m, mp);
    const double exact = alpha_coefficient(joint);
    CHECK(alpha_pair_enumeration(joint) == doctest::Approx(exact).epsilon(1e-12));
    const double climbed = alpha_hill_climb(joint, rng, 40);
    CHECK(climbed <= exact + 1e-12);
    CHECK(climbed == doctest::Approx(exact).epsilon(1e-9));
  }
}

TEST_CASE("phi asymmetry witness") {
  Eigen::MatrixXd p(2, 2);
  p << 0.5, 0.2, 0.0, 0.3;
  const FiniteJoint joint(p);
  CHECK(phi_coefficient(joint) != doctest::Approx(phi_coefficient(joint.transposed())));
}

TEST_CASE("alpha decay bounded by the second eigenvalue modulus") {
  // reversible chains: the deviation from the product law is a combination
  // of powers of the sub-leading eigenvalues
  MarkovChainSpec mc3;
  mc3.trans.resize(3, 3);
  mc3.trans << 0.6, 0.3, 0.1, 0.2, 0.6, 0.2, 0.1, 0.45, 0.45;
  Eigen::VectorXd pi = cesaro_limit([&] {
    MarkovChainSpec tmp = mc3;
    tmp.init = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
    tmp.features = Eigen::MatrixXd::Zero(3, 1);
    ClassificationLabel lbl;
    lbl.eta = {0.5, 0.5, 0.5};
    tmp.label = lbl;
    return tmp;
  }());
  mc3.init = pi;
  mc3.features = Eigen::MatrixXd::Zero(3, 1);
  ClassificationLabel lbl3;
  lbl3.eta = {0.5, 0.5, 0.5};
  mc3.label = lbl3;

  const Eigen::VectorXcd eigs = Eigen::EigenSolver<Eigen::MatrixXd>(mc3.trans).eigenvalues();
  double second = 0.0;
  for (Eigen::Index i = 0; i < eigs.size(); ++i) {
    const double mag = std::abs(eigs(i));
    if (mag < 1.0 - 1e-9) second = std::max(second, mag);
  }
  double scale = 0.0;
  for (int lag = 1; lag <= 3; ++lag)
    scale = std::max(scale, alpha_coefficient(markov_lag_joint(mc3, 1, 1 + lag)) /
                                std::pow(second, lag));
  for (int lag = 4; lag <= 15; ++lag)
    CHECK(alpha_coefficient(markov_lag_joint(mc3, 1, 1 + lag)) <=
          scale * std::pow(second, lag) * (1.0 + 1e-9) + 1e-15);
}
