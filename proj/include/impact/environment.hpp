#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "impact/impact_state.hpp"
#include "impact/reward_model.hpp"
#include "impact/rng.hpp"
#include "impact/simplex.hpp"

namespace impact {

// What a policy deploys in one round. `pulled` is set by single-pull learners
// (Thompson Sampling, one-hot UCB variants): exactly that arm is activated,
// while `strategy` still drives the impact dynamics.
struct Decision {
  MetaArm strategy;
  std::optional<std::size_t> pulled;
};

struct Observation {
  long round = 0;
  MetaArm deployed;
  std::optional<std::size_t> pulled;
  std::vector<std::size_t> activated;  // ascending arm indices
  std::vector<double> rewards;         // rewards[i] belongs to activated[i]; each in {0, 1}
  std::vector<double> impact;          // f_k(t) at reward time

  bool is_activated(std::size_t k) const {
    for (auto a : activated) {
      if (a == k) return true;
    }
    return false;
  }

  std::optional<double> reward_of(std::size_t k) const {
    for (std::size_t i = 0; i < activated.size(); ++i) {
      if (activated[i] == k) return rewards[i];
    }
    return std::nullopt;
  }

  double total_reward() const {
    double s = 0.0;
    for (double r : rewards) s += r;
    return s;
  }

  friend bool operator==(const Observation&, const Observation&) = default;
};

// Activation and Bernoulli reward draws for one round given the impact vector.
// Always consumes K uniforms from each stream, so the streams stay aligned no
// matter which arms fire.
template <typename Link = IdentityLink>
Observation realize_round(const RewardModel& model, std::span<const double> impact, long round,
                          const Decision& decision, Rng& activation, Rng& reward,
                          const Link& link = Link{}) {
  const std::size_t K = model.arms();
  if (decision.strategy.size() != K || impact.size() != K) {
    throw DimensionMismatch("deployed strategy size does not match the model");
  }
  if (decision.pulled && *decision.pulled >= K) throw DimensionMismatch("pulled arm out of range");
  Observation obs;
  obs.round = round;
  obs.deployed = decision.strategy;
  obs.pulled = decision.pulled;
  obs.impact.assign(impact.begin(), impact.end());
  for (std::size_t k = 0; k < K; ++k) {
    const double u_act = activation.uniform();
    const double u_rew = reward.uniform();
    const bool active = decision.pulled ? (*decision.pulled == k) : (u_act < decision.strategy[k]);
    if (!active) continue;
    obs.activated.push_back(k);
    obs.rewards.push_back(u_rew < model.mean(k, link(impact[k])) ? 1.0 : 0.0);
  }
  return obs;
}

// Folds the deployment into the impact state first, then draws rewards with
// means r_k(f_k(t)).
template <typename Link = IdentityLink>
std::pair<Observation, ImpactState> env_step(const RewardModel& model, ImpactState state,
                                             const Decision& decision, Rng& activation, Rng& reward,
                                             const Link& link = Link{}) {
  state.update(decision.strategy);
  const auto f = state.frequencies();
  auto obs = realize_round(model, f, state.round(), decision, activation, reward, link);
  return {std::move(obs), std::move(state)};
}

// Reward means depend only on the current strategy (f = p).
inline Observation action_dependent_step(const RewardModel& model, long round, const Decision& decision,
                                         Rng& activation, Rng& reward) {
  return realize_round(model, decision.strategy.probs(), round, decision, activation, reward);
}

// sum_k p_k r_k(g(f_k)) with f taken after the round's update.
template <typename Link = IdentityLink>
double instantaneous_utility(const RewardModel& model, const ImpactState& state, const MetaArm& deployed,
                             const Link& link = Link{}) {
  if (deployed.size() != model.arms() || state.arms() != model.arms()) {
    throw DimensionMismatch("strategy, state and model arm counts differ");
  }
  double u = 0.0;
  for (std::size_t k = 0; k < deployed.size(); ++k) {
    if (deployed[k] == 0.0) continue;
    u += deployed[k] * model.mean(k, link(state.frequency(k)));
  }
  return u;
}

// History-dependent environment owning its model and impact state.
template <typename Link = IdentityLink>
class BasicEnvironment {
 public:
  BasicEnvironment(RewardModel model, double gamma, Link link = Link{})
      : model_(std::move(model)), state_(model_.arms(), gamma), link_(std::move(link)) {}

  const RewardModel& model() const noexcept { return model_; }
  const ImpactState& state() const noexcept { return state_; }
  std::size_t arms() const { return model_.arms(); }

  Observation step(const Decision& decision, Rng& activation, Rng& reward) {
    auto [obs, next] = env_step(model_, std::move(state_), decision, activation, reward, link_);
    state_ = std::move(next);
    return std::move(obs);
  }

  // Expected utility of the most recent deployment.
  double utility(const MetaArm& deployed) const {
    return instantaneous_utility(model_, state_, deployed, link_);
  }

 private:
  RewardModel model_;
  ImpactState state_;
  Link link_;
};

using Environment = BasicEnvironment<IdentityLink>;

}  // namespace impact
