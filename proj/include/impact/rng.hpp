#pragma once

#include <cstdint>
#include <random>

namespace impact {

// SplitMix64 finalizer. Used to derive independent seeds from a master seed.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// stream_i = mix64(mix64(master) + (i + 1) * golden): the i-th SplitMix64
// output from state mix64(master). Stable across platforms and
// independent of the order in which streams are requested.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(mix64(master) + (index + 1) * 0x9e3779b97f4a7c15ULL);
}

// Thin wrapper over mt19937_64 whose uniform draws do not depend on the
// standard library's distribution implementations.
class Rng {
 public:
  using result_type = std::mt19937_64::result_type;

  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    // Lemire's multiply-shift with rejection.
    unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = -n % n;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(engine_()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Beta(a, b) via two gamma draws.
  double beta(double a, double b) {
    std::gamma_distribution<double> ga(a, 1.0);
    std::gamma_distribution<double> gb(b, 1.0);
    const double x = ga(engine_);
    const double y = gb(engine_);
    return x / (x + y);
  }

 private:
  std::mt19937_64 engine_;
};

// Substreams used inside a single episode. Environment draws never share a
// stream with policy randomness.
struct EpisodeStreams {
  Rng activation;
  Rng reward;
  Rng policy;

  explicit EpisodeStreams(std::uint64_t episode_seed)
      : activation(derive_seed(episode_seed, 0)),
        reward(derive_seed(episode_seed, 1)),
        policy(derive_seed(episode_seed, 2)) {}
};

}  // namespace impact
