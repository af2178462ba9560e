#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "impact/policy.hpp"

namespace impact {

// UCB_t(p) = sqrt(K ln t / min_k n_t(p_k)) + sum_k p_k rbar_t(p_k).
// A meta arm holding an unsampled discretized arm scores +inf.
inline double action_dependent_index(const PolicyStats& stats, const MetaArm& p, double t) {
  const long n = stats.min_count(p);
  if (n == 0) return kInfinity;
  const double K = static_cast<double>(p.size());
  return std::sqrt(K * std::log(t) / static_cast<double>(n)) + stats.weighted_mean(p);
}

inline std::size_t adubc_select(const PolicyStats& stats, const ActionSpace& space, long t,
                                TieBreak tie = TieBreak::lexicographic, Rng* rng = nullptr) {
  return argmax_index(
      space.size(), [&](std::size_t i) { return action_dependent_index(stats, space.arms[i], static_cast<double>(t)); }, tie, rng);
}

// The initialization schedule: deploy meta arms until every discretized arm
// has one (possibly zero) importance-weighted sample.
inline std::vector<MetaArm> adubc_init(const ActionSpace& space) { return covering_schedule(space); }

// Action-dependent UCB over the epsilon-grid. Each deployment yields one
// importance-weighted sample for each of its K discretized arms.
class ActionDependentUcb final : public Policy {
 public:
  explicit ActionDependentUcb(std::shared_ptr<const ActionSpace> space, TieBreak tie = TieBreak::lexicographic)
      : space_(std::move(space)), stats_(space_->grid), schedule_(adubc_init(*space_)), tie_(tie) {}

  Decision select(long t, Rng& rng) override {
    if (next_init_ < schedule_.size()) return {schedule_[next_init_++], std::nullopt};
    return {space_->arms[adubc_select(stats_, *space_, t, tie_, &rng)], std::nullopt};
  }

  void observe(const Observation& obs) override {
    const auto& p = obs.deployed;
    const auto levels = p.levels();
    for (std::size_t k = 0; k < levels.size(); ++k) stats_.record(k, levels[k], iw_reward(obs, k, p[k]));
  }

  long init_rounds() const override { return static_cast<long>(schedule_.size()); }
  std::string name() const override { return "aducb"; }

  const PolicyStats& stats() const noexcept { return stats_; }

 private:
  std::shared_ptr<const ActionSpace> space_;
  PolicyStats stats_;
  std::vector<MetaArm> schedule_;
  std::size_t next_init_ = 0;
  TieBreak tie_;
};

}  // namespace impact
