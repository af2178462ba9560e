#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "impact/errors.hpp"
#include "impact/policy.hpp"
#include "impact/policies/action_dependent_ucb.hpp"

namespace impact {

// Phase layout: the first `approach` rounds of each phase steer the impact
// toward the chosen meta arm, the remaining length - approach rounds collect
// samples.
struct PhaseLayout {
  long approach = 1;
  long length = 2;
  double rho = 0.5;

  long estimation_rounds() const noexcept { return length - approach; }
};

// length = ceil(approach / (1 - rho)), which always exceeds approach.
inline PhaseLayout make_phase_layout(long approach, double rho) {
  if (approach < 1) throw ConfigError("approaching stage length must be at least 1");
  if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("rho must lie in (0, 1)");
  const double raw = static_cast<double>(approach) / (1.0 - rho);
  // Guard against 8/(1-0.2) = 10.000000000000002 rounding up to 11.
  const long length = static_cast<long>(std::ceil(raw - 1e-9));
  return {approach, std::max(length, approach + 1), rho};
}

// Bias bound from incomplete convergence of the impact: K gamma^s_a (L* + 1),
// with L* the largest Lipschitz constant.
inline double approximation_error(std::size_t K, double gamma, long approach, double max_lipschitz) {
  if (gamma == 0.0) return 0.0;
  return static_cast<double>(K) * std::pow(gamma, static_cast<double>(approach)) * (max_lipschitz + 1.0);
}

// s_a = max(1, ceil(ln(eps^{1/3} / K) / ln gamma)); 1 when gamma = 0.
inline long approach_length(double epsilon, std::size_t K, double gamma) {
  if (gamma == 0.0) return 1;
  const double s = std::ceil(std::log(std::cbrt(epsilon) / static_cast<double>(K)) / std::log(gamma) - 1e-12);
  return std::max(1L, static_cast<long>(s));
}

struct ScheduleParams {
  int levels = 1;  // epsilon = 1 / levels
  long approach = 1;
  long length = 2;

  double epsilon() const noexcept { return 1.0 / levels; }
};

// epsilon = 1/n with n = clamp(round((T / ln T)^{1/3} * c_eps), K, n_max);
// s_a = max(1, ceil(ln(eps^{1/3} / K) / ln gamma)); L = ceil(s_a / (1 - rho)).
inline ScheduleParams schedule_params(long T, std::size_t K, double gamma, double rho, double c_eps = 1.0,
                                      int max_levels = 1000) {
  if (T < 2) throw InvalidHorizon("horizon must be at least 2 rounds");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in [0, 1)");
  const double Td = static_cast<double>(T);
  const double raw = std::round(std::cbrt(Td / std::log(Td)) * c_eps);
  const int n = static_cast<int>(std::clamp(raw, static_cast<double>(K), static_cast<double>(std::max<int>(max_levels, K))));
  const auto layout = make_phase_layout(approach_length(1.0 / n, K, gamma), rho);
  return {n, layout.approach, layout.length};
}

enum class HistoryLogForm {
  phase,  // ln(L rho m)
  fixed,  // ln(L rho)
};

// Phased UCB for history-dependent rewards. The chosen meta arm is held for a
// whole phase; importance-weighted rewards from the estimation rounds feed
//   UCB_m(p) = Ubar_m(p) + err + 3 sqrt(K ln(L rho m) / min_k n_m(p_k)),
// evaluated when a phase ends. Initialization plays each covering meta arm for
// one full phase.
class HistoryDependentUcb final : public Policy {
 public:
  HistoryDependentUcb(std::shared_ptr<const ActionSpace> space, PhaseLayout layout, double error_bound,
                      HistoryLogForm log_form = HistoryLogForm::phase, TieBreak tie = TieBreak::lexicographic)
      : space_(std::move(space)),
        layout_(layout),
        err_(error_bound),
        log_form_(log_form),
        tie_(tie),
        stats_(space_->grid),
        schedule_(adubc_init(*space_)) {}

  Decision select(long /*t*/, Rng& rng) override {
    if (position_ == 0) {
      if (next_init_ < schedule_.size()) {
        current_ = schedule_[next_init_++];
      } else {
        current_ = space_->arms[select_next(rng)];
      }
    }
    return {current_, std::nullopt};
  }

  void observe(const Observation& obs) override {
    ++position_;
    if (position_ > layout_.approach) {
      const auto& p = obs.deployed;
      const auto levels = p.levels();
      for (std::size_t k = 0; k < levels.size(); ++k) stats_.record(k, levels[k], iw_reward(obs, k, p[k]));
    }
    if (position_ == layout_.length) {
      position_ = 0;
      ++phases_;
    }
  }

  // Index of meta arm p after `phases` completed phases.
  double index(const MetaArm& p) const {
    const long n = stats_.min_count(p);
    if (n == 0) return kInfinity;
    double arg = static_cast<double>(layout_.length) * layout_.rho;
    if (log_form_ == HistoryLogForm::phase) arg *= static_cast<double>(phases_);
    // ln of an argument below 1 would be negative; the bonus never shrinks below zero.
    const double log_term = std::log(std::max(arg, 1.0));
    const double K = static_cast<double>(p.size());
    return stats_.weighted_mean(p) + err_ + 3.0 * std::sqrt(K * log_term / static_cast<double>(n));
  }

  long init_rounds() const override { return static_cast<long>(schedule_.size()) * layout_.length; }
  std::string name() const override { return "hducb"; }

  const PolicyStats& stats() const noexcept { return stats_; }
  const PhaseLayout& layout() const noexcept { return layout_; }
  double error_bound() const noexcept { return err_; }
  long phases_completed() const noexcept { return phases_; }

 private:
  std::size_t select_next(Rng& rng) const {
    return argmax_index(
        space_->size(), [&](std::size_t i) { return index(space_->arms[i]); }, tie_, &rng);
  }

  std::shared_ptr<const ActionSpace> space_;
  PhaseLayout layout_;
  double err_;
  HistoryLogForm log_form_;
  TieBreak tie_;
  PolicyStats stats_;
  std::vector<MetaArm> schedule_;
  std::size_t next_init_ = 0;
  MetaArm current_;
  long position_ = 0;
  long phases_ = 0;
};

}  // namespace impact
