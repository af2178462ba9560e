#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>
#include <vector>

#include "impact/policy.hpp"

namespace impact {

// Base class for single-pull index policies that announce the pulled arm as a
// one-hot strategy.
class OneHotIndexPolicy : public Policy {
 public:
  explicit OneHotIndexPolicy(std::size_t K) : K_(K) {}

  Decision select(long t, Rng& /*rng*/) override {
    pulled_ = argmax_index(K_, [&](std::size_t k) { return index(k, t); });
    return {MetaArm::one_hot(K_, pulled_), pulled_};
  }

  void observe(const Observation& obs) override {
    const auto r = obs.reward_of(pulled_);
    if (!r) throw InternalInconsistency("pulled arm produced no observation");
    update(pulled_, *r);
  }

  virtual double index(std::size_t k, long t) const = 0;

 protected:
  virtual void update(std::size_t arm, double reward) = 0;
  std::size_t arms() const noexcept { return K_; }

 private:
  std::size_t K_;
  std::size_t pulled_ = 0;
};

// Discounted UCB: N_t(k) = sum_s g^{t-s} 1(a_s = k), discounted mean, and
//   c_t(k) = 2 sqrt(xi ln(n_t) / N_t(k)),  n_t = sum_k N_t(k).
class DiscountedUcb final : public OneHotIndexPolicy {
 public:
  DiscountedUcb(std::size_t K, double discount, double xi)
      : OneHotIndexPolicy(K), discount_(discount), xi_(xi), counts_(K, 0.0), sums_(K, 0.0), pulled_ever_(K, 0) {
    if (!(discount > 0.0 && discount < 1.0)) throw ConfigError("DUCB discount must lie in (0, 1)");
  }

  double index(std::size_t k, long /*t*/) const override {
    if (!pulled_ever_[k] || counts_[k] <= 0.0) return kInfinity;
    double total = 0.0;
    for (double n : counts_) total += n;
    const double bonus = 2.0 * std::sqrt(xi_ * std::max(0.0, std::log(total)) / counts_[k]);
    return sums_[k] / counts_[k] + bonus;
  }

  double discounted_count(std::size_t k) const { return counts_[k]; }
  std::string name() const override { return "ducb"; }

 protected:
  void update(std::size_t arm, double reward) override {
    for (std::size_t k = 0; k < counts_.size(); ++k) {
      counts_[k] *= discount_;
      sums_[k] *= discount_;
    }
    counts_[arm] += 1.0;
    sums_[arm] += reward;
    pulled_ever_[arm] = 1;
  }

 private:
  double discount_;
  double xi_;
  std::vector<double> counts_;
  std::vector<double> sums_;
  std::vector<char> pulled_ever_;
};

// Sliding-window UCB over the last `window` plays:
//   c_t(k) = 2 sqrt(xi ln(min(t, window)) / N_t(k, window)).
class SlidingWindowUcb final : public OneHotIndexPolicy {
 public:
  SlidingWindowUcb(std::size_t K, long window, double xi)
      : OneHotIndexPolicy(K), window_(window), xi_(xi), counts_(K, 0), sums_(K, 0.0) {
    if (window < 1) throw ConfigError("SWUCB window must be positive");
  }

  double index(std::size_t k, long t) const override {
    if (counts_[k] == 0) return kInfinity;
    const double horizon = static_cast<double>(std::min(t, window_));
    const double n = static_cast<double>(counts_[k]);
    return sums_[k] / n + 2.0 * std::sqrt(xi_ * std::log(horizon) / n);
  }

  long window_count(std::size_t k) const { return counts_[k]; }
  std::size_t buffered() const noexcept { return history_.size(); }
  std::string name() const override { return "swucb"; }

 protected:
  void update(std::size_t arm, double reward) override {
    history_.push_back({arm, reward});
    ++counts_[arm];
    sums_[arm] += reward;
    if (static_cast<long>(history_.size()) > window_) {
      const auto [old_arm, old_reward] = history_.front();
      history_.pop_front();
      --counts_[old_arm];
      sums_[old_arm] -= old_reward;
    }
  }

 private:
  long window_;
  double xi_;
  std::vector<long> counts_;
  std::vector<double> sums_;
  std::deque<std::pair<std::size_t, double>> history_;
};

// Plain UCB1 on base arms: index = mean + sqrt(2 ln t / n).
class BaseArmUcb1 final : public OneHotIndexPolicy {
 public:
  explicit BaseArmUcb1(std::size_t K) : OneHotIndexPolicy(K), counts_(K, 0), sums_(K, 0.0) {}

  double index(std::size_t k, long t) const override {
    if (counts_[k] == 0) return kInfinity;
    const double n = static_cast<double>(counts_[k]);
    return sums_[k] / n + std::sqrt(2.0 * std::log(static_cast<double>(t)) / n);
  }

  std::string name() const override { return "ucb1"; }

 protected:
  void update(std::size_t arm, double reward) override {
    ++counts_[arm];
    sums_[arm] += reward;
  }

 private:
  std::vector<long> counts_;
  std::vector<double> sums_;
};

}  // namespace impact
