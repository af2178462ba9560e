#pragma once

#include <cctype>
#include <cmath>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "impact/errors.hpp"
#include "impact/policies/action_dependent_ucb.hpp"
#include "impact/policies/cucb.hpp"
#include "impact/policies/exp3.hpp"
#include "impact/policies/fixed.hpp"
#include "impact/policies/history_dependent_ucb.hpp"
#include "impact/policies/meta_ucb1.hpp"
#include "impact/policies/nonstationary_ucb.hpp"
#include "impact/policies/thompson.hpp"
#include "impact/policy.hpp"

namespace impact {

using ParamList = std::vector<std::pair<std::string, std::string>>;

// A policy entry of an experiment: `label` names the curve, `type` selects
// the algorithm.
struct PolicySpec {
  std::string label;
  std::string type;
  ParamList params;

  friend bool operator==(const PolicySpec&, const PolicySpec&) = default;
};

inline const std::vector<std::string>& policy_types() {
  static const std::vector<std::string> types = {"aducb", "hducb", "exp3", "mexp3", "cucb", "ducb",
                                                 "swucb", "ts",    "ucb1", "mucb1", "fixed", "oracle"};
  return types;
}

inline std::vector<double> parse_number_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
      if (used != item.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "': cannot parse number '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  return out;
}

// Typed access to a parameter list; keys that are never read are reported.
class ParamReader {
 public:
  ParamReader(const ParamList& params, std::string scope) : params_(params), scope_(std::move(scope)) {}

  const std::string* find(const std::string& key) {
    used_.insert(key);
    const std::string* hit = nullptr;
    for (const auto& [k, v] : params_) {
      if (k == key) hit = &v;
    }
    return hit;
  }

  double number(const std::string& key, double fallback) {
    const auto* v = find(key);
    if (!v) return fallback;
    return parse_number_list(qualified(key), *v).at(0);
  }

  long integer(const std::string& key, long fallback) {
    const double x = number(key, static_cast<double>(fallback));
    if (x != std::floor(x)) throw ConfigError("key '" + qualified(key) + "' must be an integer");
    return static_cast<long>(x);
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const auto* v = find(key);
    return v ? *v : fallback;
  }

  std::string choice(const std::string& key, const std::string& fallback, const std::vector<std::string>& allowed) {
    auto v = text(key, fallback);
    for (const auto& a : allowed) {
      if (a == v) return v;
    }
    throw ConfigError("key '" + qualified(key) + "' has unsupported value '" + v + "'");
  }

  void finish() const {
    for (const auto& [k, v] : params_) {
      if (!used_.contains(k)) throw ConfigError("unknown key '" + qualified(k) + "'");
    }
  }

 private:
  std::string qualified(const std::string& key) const { return scope_.empty() ? key : scope_ + "." + key; }

  const ParamList& params_;
  std::string scope_;
  std::set<std::string> used_;
};

inline TieBreak read_tie_break(ParamReader& r) {
  return r.choice("tie_break", "lexicographic", {"lexicographic", "random"}) == "random" ? TieBreak::random
                                                                                       : TieBreak::lexicographic;
}

inline std::unique_ptr<Policy> make_policy(const PolicySpec& spec, const PolicyContext& ctx) {
  ParamReader r(spec.params, "policy." + spec.label);
  const std::size_t K = ctx.arms();
  std::unique_ptr<Policy> policy;
  const auto& type = spec.type;
  if (type == "aducb") {
    policy = std::make_unique<ActionDependentUcb>(ctx.space, read_tie_break(r));
  } else if (type == "hducb") {
    const double rho = r.number("rho", ctx.rho);
    const double gamma = r.number("gamma", ctx.gamma);
    const long approach = r.integer("approach", approach_length(ctx.space->grid.epsilon(), K, gamma));
    const auto form = r.choice("log_form", "phase", {"phase", "fixed"}) == "fixed" ? HistoryLogForm::fixed
                                                                                  : HistoryLogForm::phase;
    const auto layout = make_phase_layout(approach, rho);
    const double err = approximation_error(K, gamma, layout.approach, ctx.max_lipschitz);
    policy = std::make_unique<HistoryDependentUcb>(ctx.space, layout, err, form, read_tie_break(r));
  } else if (type == "exp3") {
    const auto mode = r.choice("deploy", "sampled", {"sampled", "distribution"}) == "distribution"
                          ? Exp3Deployment::distribution
                          : Exp3Deployment::sampled;
    policy = std::make_unique<Exp3>(K, ctx.horizon, mode, r.number("eta", -1.0));
  } else if (type == "mexp3") {
    policy = std::make_unique<MetaExp3>(ctx.space, ctx.horizon, r.number("eta", -1.0));
  } else if (type == "cucb") {
    policy = std::make_unique<Cucb>(ctx.space, read_tie_break(r));
  } else if (type == "ducb") {
    policy = std::make_unique<DiscountedUcb>(K, r.number("gamma_d", 0.8), r.number("xi", 1.0));
  } else if (type == "swucb") {
    policy = std::make_unique<SlidingWindowUcb>(K, r.integer("window", 200), r.number("xi", 1.0));
  } else if (type == "ts") {
    const auto est = r.choice("strategy_estimator", "auto", {"auto", "monte_carlo", "exact"});
    const auto estimator = est == "exact"         ? TsEstimator::exact
                           : est == "monte_carlo" ? TsEstimator::monte_carlo
                                                  : TsEstimator::automatic;
    try {
      policy = std::make_unique<ThompsonSampling>(K, r.integer("strategy_samples", 10000), estimator);
    } catch (const ConfigError& e) {
      throw ConfigError("key 'policy." + spec.label + ".strategy_estimator': " + e.what());
    }
  } else if (type == "ucb1") {
    policy = std::make_unique<BaseArmUcb1>(K);
  } else if (type == "mucb1") {
    policy = std::make_unique<MetaUcb1>(ctx.space, read_tie_break(r));
  } else if (type == "fixed") {
    const auto* s = r.find("strategy");
    if (!s) throw ConfigError("key 'policy." + spec.label + ".strategy' is required for a fixed policy");
    auto probs = parse_number_list("policy." + spec.label + ".strategy", *s);
    if (probs.size() != K) throw ConfigError("key 'policy." + spec.label + ".strategy' must list K values");
    try {
      policy = std::make_unique<FixedPolicy>(MetaArm(std::move(probs)), "fixed");
    } catch (const InvalidMetaArm& e) {
      throw ConfigError("key 'policy." + spec.label + ".strategy': " + e.what());
    }
  } else if (type == "oracle") {
    policy = std::make_unique<FixedPolicy>(ctx.benchmark, "oracle");
  } else {
    throw ConfigError("unknown policy type '" + type + "' (key 'policy." + spec.label + ".type')");
  }
  r.finish();
  return policy;
}

}  // namespace impact
