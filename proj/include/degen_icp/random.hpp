#ifndef DEGEN_ICP_RANDOM_HPP
#define DEGEN_ICP_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <numbers>

namespace degen_icp {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seedable SplitMix64 generator with a portable Box-Muller normal sampler.
///
/// Output is bit-identical across platforms and standard libraries (unlike
/// std::normal_distribution). Independent streams come from stream(seed, id):
/// Monte Carlo trial t always draws from stream(seed, t), so splitting trials
/// across workers reproduces the sequential result.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : state_(mix64(seed ^ 0x6a09e667f3bcc909ULL)) {}

  static Rng stream(std::uint64_t seed, std::uint64_t id) {
    return Rng(mix64(seed) ^ mix64(id + 0x9e3779b97f4a7c15ULL));
  }

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace degen_icp

#endif  // DEGEN_ICP_RANDOM_HPP
