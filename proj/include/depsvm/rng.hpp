#pragma once

#include <cstdint>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace depsvm {

// splitmix64 finalizer; used to derive independent stream seeds.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 0x632be59bd9b4e019ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic draws on top of std::mt19937_64. The engine is
// bit-reproducible by the standard; the <random> distributions are not,
// so the transforms live here.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0)
      : engine_(mix_seed(seed, stream)) {}

  std::uint64_t next_u64() { return engine_(); }

  // [0, 1) with 53 random bits
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // standard normal, Marsaglia polar with one cached value
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    cached_ = v * m;
    has_cached_ = true;
    return u * m;
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Student-t with integer dof, via normal / sqrt(chi2/dof)
  double student_t(int dof) {
    if (dof < 1) throw std::invalid_argument("student_t: dof must be >= 1");
    const double z = normal();
    double chi2 = 0.0;
    for (int i = 0; i < dof; ++i) {
      const double g = normal();
      chi2 += g * g;
    }
    return z / std::sqrt(chi2 / dof);
  }

  // index sampled by CDF inversion; probs need not be exactly normalized
  int categorical(const std::vector<double>& probs) {
    if (probs.empty()) throw std::invalid_argument("categorical: empty probs");
    double total = 0.0;
    for (double p : probs) total += p;
    const double u = uniform01() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
  }

  int bernoulli(double p) { return uniform01() < p ? 1 : 0; }

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace depsvm
