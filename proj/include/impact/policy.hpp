#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "impact/environment.hpp"
#include "impact/errors.hpp"
#include "impact/rng.hpp"
#include "impact/simplex.hpp"

namespace impact {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class TieBreak { lexicographic, random };

// Everything a policy may know about the experiment before round 1.
struct PolicyContext {
  std::shared_ptr<const ActionSpace> space;
  long horizon = 0;
  double gamma = 0.0;
  double max_lipschitz = 1.0;
  double rho = 0.2;  // estimation ratio for phased policies
  MetaArm benchmark;  // used only by the oracle policy

  std::size_t arms() const { return space->grid.arms(); }
};

// select(t) is called once per round t = 1, 2, ... and is always followed by
// observe() with that round's observation.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual Decision select(long t, Rng& rng) = 0;
  virtual void observe(const Observation& obs) = 0;
  // Rounds spent on the initialization schedule; the horizon must cover them.
  virtual long init_rounds() const { return 0; }
  virtual std::string name() const = 0;
};

// Index of the maximal score over [0, count). Lexicographic mode returns the
// first maximizer; random mode picks uniformly among exact ties.
template <typename Score>
std::size_t argmax_index(std::size_t count, Score&& score, TieBreak tie = TieBreak::lexicographic,
                         Rng* rng = nullptr) {
  std::size_t best = 0;
  double best_score = -kInfinity;
  std::size_t ties = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const double s = score(i);
    if (s > best_score || i == 0) {
      best_score = s;
      best = i;
      ties = 1;
    } else if (s == best_score && tie == TieBreak::random && rng != nullptr) {
      // Reservoir sampling over the tied set.
      ++ties;
      if (rng->below(ties) == 0) best = i;
    }
  }
  return best;
}

// Importance-weighted reward: X_k / p_k when arm k fired, 0 otherwise.
inline double iw_reward(const Observation& obs, std::size_t k, double deployed_prob) {
  const auto r = obs.reward_of(k);
  if (!r) return 0.0;
  if (!(deployed_prob > 0.0)) {
    throw InternalInconsistency("arm " + std::to_string(k) + " activated with deployed probability 0");
  }
  return *r / deployed_prob;
}

// Per-discretized-arm sample counts and reward sums.
class PolicyStats {
 public:
  explicit PolicyStats(const SimplexGrid& grid)
      : grid_(grid), counts_(grid.discretized_count(), 0), sums_(grid.discretized_count(), 0.0) {}

  const SimplexGrid& grid() const noexcept { return grid_; }

  void record(std::size_t arm, int level, double value) {
    const auto i = grid_.index(arm, level);
    ++counts_[i];
    sums_[i] += value;
  }

  long count(std::size_t arm, int level) const { return counts_[grid_.index(arm, level)]; }
  double sum(std::size_t arm, int level) const { return sums_[grid_.index(arm, level)]; }

  // Empirical mean; only meaningful when count > 0.
  double mean(std::size_t arm, int level) const {
    const auto i = grid_.index(arm, level);
    return counts_[i] > 0 ? sums_[i] / static_cast<double>(counts_[i]) : 0.0;
  }

  // min over k of n(p_k) and sum_k p_k rbar(p_k) for an on-grid meta arm.
  long min_count(const MetaArm& p) const {
    long m = std::numeric_limits<long>::max();
    const auto levels = p.levels();
    for (std::size_t k = 0; k < levels.size(); ++k) m = std::min(m, count(k, levels[k]));
    return m;
  }

  double weighted_mean(const MetaArm& p) const {
    double u = 0.0;
    const auto levels = p.levels();
    for (std::size_t k = 0; k < levels.size(); ++k) u += p[k] * mean(k, levels[k]);
    return u;
  }

 private:
  SimplexGrid grid_;
  std::vector<long> counts_;
  std::vector<double> sums_;
};

}  // namespace impact
