#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "impact/errors.hpp"

namespace impact {

inline constexpr double kSimplexTolerance = 1e-9;

// A mixed strategy over K base arms. When the strategy lies on an epsilon grid
// the integer levels are kept alongside the probabilities, so sums stay exact.
class MetaArm {
 public:
  MetaArm() = default;

  explicit MetaArm(std::vector<double> probs) : probs_(std::move(probs)) { validate(); }

  // probs[k] = levels[k] / denominator.
  static MetaArm from_levels(std::vector<int> levels, int denominator) {
    if (denominator < 1) throw InvalidMetaArm("grid denominator must be positive");
    const long total = std::accumulate(levels.begin(), levels.end(), 0L);
    if (total != denominator) throw InvalidMetaArm("grid levels must sum to the denominator");
    MetaArm arm;
    arm.probs_.reserve(levels.size());
    for (int level : levels) {
      if (level < 0) throw InvalidMetaArm("negative grid level");
      arm.probs_.push_back(static_cast<double>(level) / denominator);
    }
    arm.levels_ = std::move(levels);
    arm.denominator_ = denominator;
    return arm;
  }

  static MetaArm one_hot(std::size_t K, std::size_t arm) {
    std::vector<int> levels(K, 0);
    levels.at(arm) = 1;
    return from_levels(std::move(levels), 1);
  }

  static MetaArm uniform(std::size_t K) { return MetaArm(std::vector<double>(K, 1.0 / K)); }

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t k) const { return probs_[k]; }
  std::span<const double> probs() const noexcept { return probs_; }

  bool on_grid() const noexcept { return denominator_ > 0; }
  std::span<const int> levels() const noexcept { return levels_; }
  int denominator() const noexcept { return denominator_; }

  friend bool operator==(const MetaArm& a, const MetaArm& b) { return a.probs_ == b.probs_; }

 private:
  void validate() const {
    if (probs_.empty()) throw InvalidMetaArm("meta arm must have at least one entry");
    double sum = 0.0;
    for (double p : probs_) {
      if (!(p >= 0.0) || p > 1.0 + kSimplexTolerance) {
        throw InvalidMetaArm("meta arm entries must lie in [0, 1]");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kSimplexTolerance) {
      throw InvalidMetaArm("meta arm entries must sum to 1");
    }
  }

  std::vector<double> probs_;
  std::vector<int> levels_;
  int denominator_ = 0;
};

// (base arm, grid level) pair; the probability is level / n.
struct DiscretizedArm {
  std::size_t arm = 0;
  int level = 1;

  friend bool operator==(const DiscretizedArm&, const DiscretizedArm&) = default;
};

// Uniform grid {1/n, 2/n, ..., 1} for each of K base arms. The grid is always
// constructible; enumeration requires K <= n.
class SimplexGrid {
 public:
  SimplexGrid(std::size_t K, int levels) : K_(K), levels_(levels) {
    if (K < 1) throw InvalidDiscretization("arm count must be at least 1");
    if (levels < 1) throw InvalidDiscretization("grid must have at least one level");
  }

  std::size_t arms() const noexcept { return K_; }
  int levels() const noexcept { return levels_; }
  double epsilon() const noexcept { return 1.0 / levels_; }
  bool feasible() const noexcept { return static_cast<long>(K_) <= levels_; }

  // Highest level a single arm can take while every other arm keeps >= 1.
  int max_level() const noexcept { return levels_ - static_cast<int>(K_) + 1; }

  // Flat index of a discretized arm, for per-arm statistic tables.
  std::size_t index(DiscretizedArm d) const noexcept {
    return d.arm * static_cast<std::size_t>(levels_) + static_cast<std::size_t>(d.level - 1);
  }
  std::size_t index(std::size_t arm, int level) const noexcept { return index({arm, level}); }
  std::size_t discretized_count() const noexcept { return K_ * static_cast<std::size_t>(levels_); }

  friend bool operator==(const SimplexGrid&, const SimplexGrid&) = default;

 private:
  std::size_t K_;
  int levels_;
};

inline SimplexGrid make_grid(std::size_t K, int levels) { return SimplexGrid(K, levels); }

// epsilon must be 1/n for a positive integer n (checked to 1e-9).
inline SimplexGrid make_grid(std::size_t K, double epsilon) {
  if (!(epsilon > 0.0) || epsilon > 1.0) {
    throw InvalidDiscretization("epsilon must lie in (0, 1]");
  }
  const double inverse = 1.0 / epsilon;
  const double n = std::round(inverse);
  if (std::abs(n * epsilon - 1.0) > 1e-9) {
    throw InvalidDiscretization("epsilon must be of the form 1/n, got " + std::to_string(epsilon));
  }
  return SimplexGrid(K, static_cast<int>(n));
}

// Accepts "1/n" or a decimal such as "0.25" and returns n.
inline int parse_grid_levels(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const auto num = trim(text.substr(0, slash));
    const auto den = trim(text.substr(slash + 1));
    long a = 0, b = 0;
    auto r1 = std::from_chars(num.data(), num.data() + num.size(), a);
    auto r2 = std::from_chars(den.data(), den.data() + den.size(), b);
    if (r1.ec != std::errc{} || r1.ptr != num.data() + num.size() || r2.ec != std::errc{} ||
        r2.ptr != den.data() + den.size() || a <= 0 || b <= 0 || b % a != 0) {
      throw InvalidDiscretization("epsilon must be of the form 1/n, got '" + std::string(text) + "'");
    }
    return static_cast<int>(b / a);
  }
  double value = 0.0;
  try {
    std::size_t used = 0;
    value = std::stod(std::string(text), &used);
    if (used != text.size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw InvalidDiscretization("cannot parse epsilon '" + std::string(text) + "'");
  }
  return make_grid(1, value).levels();
}

// Visits every composition of n into K positive parts in lexicographic order.
// The callback receives the level vector; returning false stops the walk.
template <typename Visitor>
void for_each_composition(const SimplexGrid& grid, Visitor&& visit) {
  if (!grid.feasible()) {
    throw EmptyActionSpace("no meta arm exists: K * epsilon > 1 (K=" + std::to_string(grid.arms()) +
                           ", n=" + std::to_string(grid.levels()) + ")");
  }
  const std::size_t K = grid.arms();
  const int n = grid.levels();
  std::vector<int> levels(K, 1);
  if (K == 1) {
    levels[0] = n;
    visit(std::as_const(levels));
    return;
  }
  // levels[0..K-2] are free digits; the last entry absorbs the remainder.
  levels[K - 1] = n - static_cast<int>(K) + 1;
  std::vector<int> prefix(K - 1);
  while (true) {
    if (!visit(std::as_const(levels))) return;
    std::partial_sum(levels.begin(), levels.end() - 1, prefix.begin());
    // Rightmost digit that can grow by one with every later entry reset to 1.
    std::size_t pos = K - 1;
    for (std::size_t i = K - 1; i-- > 0;) {
      const int tail = static_cast<int>(K - 1 - i);  // entries after i, each reset to 1
      if (prefix[i] + 1 + tail <= n) {
        pos = i;
        break;
      }
    }
    if (pos == K - 1) return;
    ++levels[pos];
    for (std::size_t j = pos + 1; j + 1 < K; ++j) levels[j] = 1;
    levels[K - 1] = n - std::accumulate(levels.begin(), levels.end() - 1, 0);
  }
}

inline std::vector<MetaArm> enumerate_meta_arms(const SimplexGrid& grid) {
  std::vector<MetaArm> out;
  for_each_composition(grid, [&](const std::vector<int>& levels) {
    out.push_back(MetaArm::from_levels(levels, grid.levels()));
    return true;
  });
  return out;
}

// The enumerated action space of a grid, built once and shared read-only by
// every policy of an experiment.
struct ActionSpace {
  SimplexGrid grid;
  std::vector<MetaArm> arms;

  explicit ActionSpace(const SimplexGrid& g) : grid(g), arms(enumerate_meta_arms(g)) {}

  std::size_t size() const noexcept { return arms.size(); }
};

// A deterministic covering sequence: every feasible discretized arm appears in
// at least one scheduled meta arm. Greedy set cover over the lexicographic
// enumeration; ties go to the earlier meta arm.
inline std::vector<MetaArm> covering_schedule(const ActionSpace& space) {
  const auto& grid = space.grid;
  // (arm, level) pairs that no meta arm reaches start out covered.
  std::vector<char> covered(grid.discretized_count(), 1);
  std::size_t remaining = 0;
  for (const auto& p : space.arms) {
    const auto levels = p.levels();
    for (std::size_t k = 0; k < levels.size(); ++k) {
      auto& c = covered[grid.index(k, levels[k])];
      if (c) {
        c = 0;
        ++remaining;
      }
    }
  }
  std::vector<MetaArm> schedule;
  while (remaining > 0) {
    std::size_t best = space.size();
    std::size_t best_gain = 0;
    for (std::size_t i = 0; i < space.size(); ++i) {
      const auto levels = space.arms[i].levels();
      std::size_t gain = 0;
      for (std::size_t k = 0; k < levels.size(); ++k) gain += !covered[grid.index(k, levels[k])];
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    if (best == space.size()) throw InternalInconsistency("covering schedule failed to progress");
    const auto levels = space.arms[best].levels();
    for (std::size_t k = 0; k < levels.size(); ++k) {
      auto& c = covered[grid.index(k, levels[k])];
      if (!c) {
        c = 1;
        --remaining;
      }
    }
    schedule.push_back(space.arms[best]);
  }
  return schedule;
}

}  // namespace impact
