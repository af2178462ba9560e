#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "impact/policy.hpp"

namespace impact {

// eta = min(1, sqrt(N ln N / ((e - 1) T))) for N actions over horizon T.
inline double exp3_rate(std::size_t actions, long horizon) {
  if (actions <= 1 || horizon < 1) return 0.0;
  const double N = static_cast<double>(actions);
  return std::min(1.0, std::sqrt(N * std::log(N) / ((std::numbers::e - 1.0) * static_cast<double>(horizon))));
}

// Exponential weights with uniform mixing, stored as log-weights.
class ExpWeights {
 public:
  ExpWeights(std::size_t actions, double rate) : log_w_(actions, 0.0), rate_(rate) {}

  std::size_t size() const noexcept { return log_w_.size(); }
  double rate() const noexcept { return rate_; }
  const std::vector<double>& log_weights() const noexcept { return log_w_; }

  // (1 - eta) w_i / sum w + eta / N
  std::vector<double> distribution() const {
    const double top = *std::max_element(log_w_.begin(), log_w_.end());
    std::vector<double> p(log_w_.size());
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) total += (p[i] = std::exp(log_w_[i] - top));
    const double N = static_cast<double>(p.size());
    for (auto& x : p) x = (1.0 - rate_) * x / total + rate_ / N;
    return p;
  }

  // w_i <- w_i exp(eta * xhat / N)
  void reward(std::size_t i, double estimate) {
    log_w_[i] += rate_ * estimate / static_cast<double>(log_w_.size());
  }

 private:
  std::vector<double> log_w_;
  double rate_;
};

inline std::size_t sample_index(std::span<const double> p, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return i;
  }
  return p.size() - 1;
}

// Renormalizes a distribution that may drift from 1 by rounding.
inline MetaArm to_meta_arm(std::vector<double> p) {
  double s = 0.0;
  for (double x : p) s += x;
  for (auto& x : p) x /= s;
  return MetaArm(std::move(p));
}

enum class Exp3Deployment {
  sampled,       // deploy the sampled base arm as a one-hot strategy
  distribution,  // deploy the sampling distribution itself
};

// EXP3 over the K base arms.
class Exp3 final : public Policy {
 public:
  Exp3(std::size_t K, long horizon, Exp3Deployment mode, double rate = -1.0)
      : weights_(K, rate >= 0.0 ? rate : exp3_rate(K, horizon)), mode_(mode) {}

  Decision select(long /*t*/, Rng& rng) override {
    probs_ = weights_.distribution();
    if (mode_ == Exp3Deployment::distribution) return {to_meta_arm(probs_), std::nullopt};
    const auto arm = sample_index(probs_, rng);
    return {MetaArm::one_hot(probs_.size(), arm), arm};
  }

  void observe(const Observation& obs) override {
    for (std::size_t i = 0; i < obs.activated.size(); ++i) {
      const auto k = obs.activated[i];
      weights_.reward(k, obs.rewards[i] / probs_[k]);
    }
  }

  std::string name() const override { return "exp3"; }
  const ExpWeights& weights() const noexcept { return weights_; }

 private:
  ExpWeights weights_;
  Exp3Deployment mode_;
  std::vector<double> probs_;
};

// EXP3 whose actions are the enumerated meta arms. The total observed reward
// of the drawn meta arm is importance-weighted by its selection probability.
class MetaExp3 final : public Policy {
 public:
  MetaExp3(std::shared_ptr<const ActionSpace> space, long horizon, double rate = -1.0)
      : space_(std::move(space)), weights_(space_->size(), rate >= 0.0 ? rate : exp3_rate(space_->size(), horizon)) {}

  Decision select(long /*t*/, Rng& rng) override {
    probs_ = weights_.distribution();
    drawn_ = sample_index(probs_, rng);
    return {space_->arms[drawn_], std::nullopt};
  }

  void observe(const Observation& obs) override { weights_.reward(drawn_, obs.total_reward() / probs_[drawn_]); }

  std::string name() const override { return "mexp3"; }
  const ExpWeights& weights() const noexcept { return weights_; }

 private:
  std::shared_ptr<const ActionSpace> space_;
  ExpWeights weights_;
  std::vector<double> probs_;
  std::size_t drawn_ = 0;
};

}  // namespace impact
