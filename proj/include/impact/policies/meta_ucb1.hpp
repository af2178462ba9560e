#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "impact/policy.hpp"

namespace impact {

// UCB1 treating each enumerated meta arm as an atomic arm. Its action count
// grows as C(n-1, K-1), which is the blowup the per-discretized-arm index avoids.
class MetaUcb1 final : public Policy {
 public:
  explicit MetaUcb1(std::shared_ptr<const ActionSpace> space, TieBreak tie = TieBreak::lexicographic)
      : space_(std::move(space)), plays_(space_->size(), 0), sums_(space_->size(), 0.0), tie_(tie) {}

  double index(std::size_t i, long t) const {
    if (plays_[i] == 0) return kInfinity;
    const double n = static_cast<double>(plays_[i]);
    return sums_[i] / n + std::sqrt(2.0 * std::log(static_cast<double>(t)) / n);
  }

  Decision select(long t, Rng& rng) override {
    chosen_ = argmax_index(
        space_->size(), [&](std::size_t i) { return index(i, t); }, tie_, &rng);
    return {space_->arms[chosen_], std::nullopt};
  }

  void observe(const Observation& obs) override {
    ++plays_[chosen_];
    sums_[chosen_] += obs.total_reward();
  }

  std::string name() const override { return "mucb1"; }

  // Test hook: seed the per-meta-arm statistics.
  void set_stats(std::size_t i, long plays, double sum) {
    plays_[i] = plays;
    sums_[i] = sum;
  }

 private:
  std::shared_ptr<const ActionSpace> space_;
  std::vector<long> plays_;
  std::vector<double> sums_;
  std::size_t chosen_ = 0;
  TieBreak tie_;
};

}  // namespace impact
