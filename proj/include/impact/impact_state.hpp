#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "impact/errors.hpp"
#include "impact/simplex.hpp"

namespace impact {

// Time-discounted frequency of past deployments:
//   f_k(t) = sum_{s<=t} p_k(s) gamma^{t-s} / sum_{s<=t} gamma^{t-s}.
// Numerators follow N <- p + gamma N; the denominator is kept in closed form.
class ImpactState {
 public:
  ImpactState(std::size_t K, double gamma) : gamma_(gamma), numerators_(K, 0.0) {
    if (K < 1) throw DimensionMismatch("impact state needs at least one arm");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw DomainError("gamma must lie in [0, 1)");
  }

  std::size_t arms() const noexcept { return numerators_.size(); }
  double gamma() const noexcept { return gamma_; }
  long round() const noexcept { return t_; }
  const std::vector<double>& numerators() const noexcept { return numerators_; }

  // D(t) = (1 - gamma^t) / (1 - gamma); D = 1 when gamma = 0 (0^0 = 1).
  double denominator() const {
    if (t_ == 0) return 0.0;
    if (gamma_ == 0.0) return 1.0;
    return -std::expm1(t_ * std::log(gamma_)) / (1.0 - gamma_);
  }

  // f_k(t); zero before the first deployment.
  double frequency(std::size_t k) const {
    if (t_ == 0) return 0.0;
    const double f = numerators_[k] / denominator();
    return f < 0.0 ? 0.0 : (f > 1.0 ? 1.0 : f);
  }

  std::vector<double> frequencies() const {
    std::vector<double> f(arms());
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = frequency(k);
    return f;
  }

  void update(std::span<const double> deployed) {
    if (deployed.size() != arms()) throw DimensionMismatch("deployed strategy size does not match state");
    for (std::size_t k = 0; k < numerators_.size(); ++k) {
      numerators_[k] = deployed[k] + gamma_ * numerators_[k];
    }
    ++t_;
  }
  void update(const MetaArm& deployed) { update(deployed.probs()); }

 private:
  double gamma_;
  std::vector<double> numerators_;
  long t_ = 0;
};

inline ImpactState impact_update(ImpactState state, const MetaArm& deployed) {
  state.update(deployed);
  return state;
}

// Maps the impact f_k(t) to the input of r_k. Any link g with
// |f_k(t+s) - g(p_k)| <= gamma^s under constant deployment fits here.
struct IdentityLink {
  double operator()(double f) const noexcept { return f; }
};

}  // namespace impact
