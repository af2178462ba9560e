#pragma once

#include <string>

#include "impact/policy.hpp"

namespace impact {

// Deploys the same strategy every round. With the benchmark strategy this is
// the oracle policy.
class FixedPolicy final : public Policy {
 public:
  FixedPolicy(MetaArm strategy, std::string label) : strategy_(std::move(strategy)), label_(std::move(label)) {}

  Decision select(long /*t*/, Rng& /*rng*/) override { return {strategy_, std::nullopt}; }
  void observe(const Observation& /*obs*/) override {}
  std::string name() const override { return label_; }

 private:
  MetaArm strategy_;
  std::string label_;
};

}  // namespace impact
