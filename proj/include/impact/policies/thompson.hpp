#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "impact/policy.hpp"

namespace impact {

// P(X > Y) for X ~ Beta(a, b), Y ~ Beta(c, d) with integer parameters, kept
// up to date one unit step at a time. Each step adds or subtracts
// h = B(a+c, b+d) / (B(a,b) B(c,d)) scaled by the parameter being bumped.
class BetaWinProbability {
 public:
  double value() const noexcept { return value_; }

  // Posterior update for X (first = true) or Y after one Bernoulli outcome.
  void add(bool first, bool success) {
    const double h = std::exp(std::lgamma(a_ + c_) + std::lgamma(b_ + d_) - std::lgamma(a_ + b_ + c_ + d_) -
                              lbeta(a_, b_) - lbeta(c_, d_));
    if (first && success) {
      value_ += h / a_;
      a_ += 1.0;
    } else if (first) {
      value_ -= h / b_;
      b_ += 1.0;
    } else if (success) {
      value_ -= h / c_;
      c_ += 1.0;
    } else {
      value_ += h / d_;
      d_ += 1.0;
    }
    value_ = std::clamp(value_, 0.0, 1.0);
  }

 private:
  static double lbeta(double x, double y) { return std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y); }

  double a_ = 1.0, b_ = 1.0, c_ = 1.0, d_ = 1.0;
  double value_ = 0.5;
};

// How the announced strategy is computed: Monte-Carlo frequencies of winning a
// posterior draw, or (two arms only) the exact win probability. `automatic`
// picks exact when K = 2.
enum class TsEstimator { automatic, monte_carlo, exact };

// Bernoulli Thompson Sampling with Beta(S + 1, F + 1) posteriors. It pulls the
// argmax of one posterior draw; the strategy it announces to the environment
// is the probability with which each arm wins a posterior draw, floored at
// 1e-6 and renormalized.
class ThompsonSampling final : public Policy {
 public:
  ThompsonSampling(std::size_t K, long strategy_samples, TsEstimator estimator = TsEstimator::automatic)
      : successes_(K, 0), failures_(K, 0), samples_(strategy_samples) {
    if (strategy_samples < 1) throw ConfigError("Thompson strategy sample count must be positive");
    if (estimator == TsEstimator::automatic) estimator = K == 2 ? TsEstimator::exact : TsEstimator::monte_carlo;
    if (estimator == TsEstimator::exact && K != 2) {
      throw ConfigError("exact Thompson strategy estimate needs exactly two arms");
    }
    exact_ = estimator == TsEstimator::exact;
  }

  Decision select(long /*t*/, Rng& rng) override {
    std::vector<double> theta(arms());
    draw(theta, rng);
    pulled_ = argmax_index(theta.size(), [&](std::size_t k) { return theta[k]; });
    return {announced_strategy(rng), pulled_};
  }

  void observe(const Observation& obs) override {
    const auto r = obs.reward_of(pulled_);
    if (!r) throw InternalInconsistency("pulled arm produced no observation");
    const bool success = *r >= 1.0;
    if (success) {
      ++successes_[pulled_];
    } else {
      ++failures_[pulled_];
    }
    if (exact_) win_.add(pulled_ == 0, success);
  }

  bool exact() const noexcept { return exact_; }

  MetaArm announced_strategy(Rng& rng) const {
    const std::size_t K = arms();
    std::vector<double> wins(K, 0.0);
    if (exact_) {
      wins[0] = win_.value();
      wins[1] = 1.0 - win_.value();
    } else {
      std::vector<double> theta(K);
      for (long s = 0; s < samples_; ++s) {
        draw(theta, rng);
        wins[argmax_index(K, [&](std::size_t k) { return theta[k]; })] += 1.0;
      }
      for (auto& w : wins) w /= static_cast<double>(samples_);
    }
    double total = 0.0;
    for (auto& w : wins) total += (w = std::max(w, 1e-6));
    for (auto& w : wins) w /= total;
    return MetaArm(std::move(wins));
  }

  long successes(std::size_t k) const { return successes_[k]; }
  long failures(std::size_t k) const { return failures_[k]; }
  void set_posterior(std::size_t k, long s, long f) {
    successes_[k] = s;
    failures_[k] = f;
    if (exact_) {
      // Replay from the uniform prior so the win probability stays exact.
      win_ = {};
      for (std::size_t arm = 0; arm < 2; ++arm) {
        for (long i = 0; i < successes_[arm]; ++i) win_.add(arm == 0, true);
        for (long i = 0; i < failures_[arm]; ++i) win_.add(arm == 0, false);
      }
    }
  }

  std::string name() const override { return "ts"; }

 private:
  std::size_t arms() const noexcept { return successes_.size(); }

  void draw(std::vector<double>& theta, Rng& rng) const {
    for (std::size_t k = 0; k < theta.size(); ++k) {
      theta[k] = rng.beta(static_cast<double>(successes_[k]) + 1.0, static_cast<double>(failures_[k]) + 1.0);
    }
  }

  std::vector<long> successes_;
  std::vector<long> failures_;
  long samples_;
  bool exact_ = false;
  BetaWinProbability win_;
  std::size_t pulled_ = 0;
};

}  // namespace impact
