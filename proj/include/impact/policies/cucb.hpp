#pragma once

#include <cmath>
#include <memory>
#include <string>

#include "impact/policy.hpp"

namespace impact {

// Combinatorial UCB over discretized arms. Only activated arms produce samples
// and rewards are used as observed (no importance weighting).
//   index(p_k) = rbar(p_k) + sqrt(3 ln t / (2 n(p_k))),
// and the oracle maximizes sum_k p_k index(p_k) over the grid.
class Cucb final : public Policy {
 public:
  explicit Cucb(std::shared_ptr<const ActionSpace> space, TieBreak tie = TieBreak::lexicographic)
      : space_(std::move(space)), stats_(space_->grid), tie_(tie) {}

  double arm_index(std::size_t k, int level, long t) const {
    const long n = stats_.count(k, level);
    if (n == 0) return kInfinity;
    return stats_.mean(k, level) + std::sqrt(3.0 * std::log(static_cast<double>(t)) / (2.0 * n));
  }

  double meta_index(const MetaArm& p, long t) const {
    double s = 0.0;
    const auto levels = p.levels();
    for (std::size_t k = 0; k < levels.size(); ++k) s += p[k] * arm_index(k, levels[k], t);
    return s;
  }

  Decision select(long t, Rng& rng) override {
    const auto best = argmax_index(
        space_->size(), [&](std::size_t i) { return meta_index(space_->arms[i], t); }, tie_, &rng);
    return {space_->arms[best], std::nullopt};
  }

  void observe(const Observation& obs) override {
    const auto levels = obs.deployed.levels();
    for (std::size_t i = 0; i < obs.activated.size(); ++i) {
      const auto k = obs.activated[i];
      stats_.record(k, levels[k], obs.rewards[i]);
    }
  }

  std::string name() const override { return "cucb"; }
  PolicyStats& stats() noexcept { return stats_; }

 private:
  std::shared_ptr<const ActionSpace> space_;
  PolicyStats stats_;
  TieBreak tie_;
};

}  // namespace impact
