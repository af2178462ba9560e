#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "impact/benchmark.hpp"
#include "impact/environment.hpp"
#include "impact/errors.hpp"
#include "impact/policies/factory.hpp"
#include "impact/rng.hpp"

namespace impact {

// One problem instance together with its policy grid and benchmark.
struct Scenario {
  RewardModel model;
  double gamma = 0.0;
  double rho = 0.2;
  std::shared_ptr<const ActionSpace> space;
  FixedStrategy benchmark;
};

// benchmark_levels = 0 picks default_benchmark_levels(policy_levels).
inline Scenario make_scenario(RewardModel model, double gamma, int policy_levels, double rho = 0.2,
                              int benchmark_levels = 0) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in [0, 1)");
  const std::size_t K = model.arms();
  SimplexGrid grid(K, policy_levels);
  if (!grid.feasible()) {
    throw ConfigError("infeasible grid: K * epsilon > 1 (K=" + std::to_string(K) +
                      ", epsilon=1/" + std::to_string(policy_levels) + ")");
  }
  auto space = std::make_shared<const ActionSpace>(grid);
  if (benchmark_levels <= 0) benchmark_levels = default_benchmark_levels(policy_levels);
  auto best = best_fixed_strategy(model, SimplexGrid(K, benchmark_levels));
  return Scenario{std::move(model), gamma, rho, std::move(space), std::move(best)};
}

// Smallest n >= min_levels (up to max_levels) whose grid contains `target`,
// or min_levels when none does. Puts a known optimum on the policy grid.
inline int aligned_levels(int min_levels, double target, int max_levels = 1000) {
  for (int n = std::max(1, min_levels); n <= max_levels; ++n) {
    const double scaled = target * n;
    if (std::abs(scaled - std::round(scaled)) < 1e-9) return n;
  }
  return min_levels;
}

inline PolicyContext make_context(const Scenario& s, long horizon) {
  PolicyContext ctx;
  ctx.space = s.space;
  ctx.horizon = horizon;
  ctx.gamma = s.gamma;
  ctx.max_lipschitz = s.model.max_lipschitz();
  ctx.rho = s.rho;
  ctx.benchmark = s.benchmark.arm;
  return ctx;
}

struct RunRecord {
  std::uint64_t seed = 0;
  std::string policy;
  std::size_t arms = 0;
  std::vector<double> deployed;  // round-major K entries per round; empty unless requested
  std::vector<double> utility;   // U_t(p(t)) from the true means
  std::vector<double> regret;    // lambda(t) = t U(p*) - sum_{s<=t} U_s

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

// One seeded episode: select -> env_step -> observe for t = 1..T.
inline RunRecord run_episode(const Scenario& scenario, const PolicySpec& spec, long T, std::uint64_t seed,
                             bool keep_strategies = false) {
  if (T < 1) throw ConfigError("horizon must be at least 1");
  auto policy = make_policy(spec, make_context(scenario, T));
  if (policy->init_rounds() > T) {
    throw ConfigError("horizon " + std::to_string(T) + " is shorter than the initialization of policy '" +
                      spec.label + "' (" + std::to_string(policy->init_rounds()) + " rounds)");
  }
  EpisodeStreams streams(seed);
  Environment env(scenario.model, scenario.gamma);
  const double target = scenario.benchmark.utility;

  RunRecord rec;
  rec.seed = seed;
  rec.policy = spec.label;
  rec.arms = scenario.model.arms();
  rec.utility.reserve(static_cast<std::size_t>(T));
  rec.regret.reserve(static_cast<std::size_t>(T));
  if (keep_strategies) rec.deployed.reserve(static_cast<std::size_t>(T) * rec.arms);

  double regret = 0.0;
  for (long t = 1; t <= T; ++t) {
    const auto decision = policy->select(t, streams.policy);
    const auto obs = env.step(decision, streams.activation, streams.reward);
    const double u = env.utility(decision.strategy);
    policy->observe(obs);
    regret += target - u;
    rec.utility.push_back(u);
    rec.regret.push_back(regret);
    if (keep_strategies) {
      const auto p = decision.strategy.probs();
      rec.deployed.insert(rec.deployed.end(), p.begin(), p.end());
    }
  }
  return rec;
}

struct AggregateCurve {
  std::vector<long> checkpoints;
  std::vector<double> mean;
  std::vector<double> std;  // sample standard deviation (n - 1); 0 for a single run
  std::size_t runs = 0;

  friend bool operator==(const AggregateCurve&, const AggregateCurve&) = default;
};

// `count` log-spaced rounds in [min(first, T), T], deduplicated, always ending at T.
inline std::vector<long> log_checkpoints(long T, std::size_t count = 100, long first = 10) {
  if (T < 1) throw ConfigError("horizon must be at least 1");
  first = std::clamp(first, 1L, T);
  std::vector<long> out;
  if (count <= 1 || first == T) return {T};
  const double a = std::log(static_cast<double>(first));
  const double b = std::log(static_cast<double>(T));
  for (std::size_t i = 0; i < count; ++i) {
    const double x = a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
    const long t = std::clamp(std::lround(std::exp(x)), first, T);
    if (out.empty() || t > out.back()) out.push_back(t);
  }
  if (out.back() != T) out.push_back(T);
  return out;
}

// Per-episode seeds derived from the master seed.
inline std::vector<std::uint64_t> episode_seeds(std::uint64_t master, std::size_t count) {
  std::vector<std::uint64_t> seeds(count);
  for (std::size_t i = 0; i < count; ++i) seeds[i] = derive_seed(master, i);
  return seeds;
}

struct Episode {
  std::shared_ptr<const Scenario> scenario;
  std::uint64_t seed = 0;
};

inline unsigned default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

// Mean and sample std across a set of regret curves sampled at checkpoints.
inline AggregateCurve aggregate(std::span<const std::vector<double>> samples, std::vector<long> checkpoints) {
  AggregateCurve curve;
  curve.checkpoints = std::move(checkpoints);
  curve.runs = samples.size();
  const std::size_t C = curve.checkpoints.size();
  curve.mean.assign(C, 0.0);
  curve.std.assign(C, 0.0);
  const double R = static_cast<double>(samples.size());
  for (std::size_t c = 0; c < C; ++c) {
    double s = 0.0;
    for (const auto& run : samples) s += run[c];
    const double m = s / R;
    double ss = 0.0;
    for (const auto& run : samples) ss += (run[c] - m) * (run[c] - m);
    curve.mean[c] = m;
    curve.std[c] = samples.size() > 1 ? std::sqrt(ss / (R - 1.0)) : 0.0;
  }
  return curve;
}

// Runs every episode (in parallel when jobs > 1) and folds the regret at the
// checkpoints in episode order, so the result does not depend on scheduling.
inline AggregateCurve replicate(std::span<const Episode> episodes, const PolicySpec& spec, long T,
                                std::vector<long> checkpoints, unsigned jobs = 1) {
  if (episodes.empty()) throw ConfigError("replicate needs at least one seed");
  for (long c : checkpoints) {
    if (c < 1 || c > T) throw ConfigError("checkpoint outside [1, T]");
  }
  std::vector<std::vector<double>> samples(episodes.size());
  std::vector<std::exception_ptr> errors(episodes.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < episodes.size(); i = next++) {
      try {
        const auto rec = run_episode(*episodes[i].scenario, spec, T, episodes[i].seed);
        auto& out = samples[i];
        out.reserve(checkpoints.size());
        for (long c : checkpoints) out.push_back(rec.regret[static_cast<std::size_t>(c - 1)]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  jobs = std::clamp<unsigned>(jobs, 1u, static_cast<unsigned>(episodes.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return aggregate(samples, std::move(checkpoints));
}

inline AggregateCurve replicate(const Scenario& scenario, const PolicySpec& spec, long T,
                                std::span<const std::uint64_t> seeds, std::vector<long> checkpoints,
                                unsigned jobs = 1) {
  if (seeds.empty()) throw ConfigError("replicate needs at least one seed");
  auto shared = std::make_shared<const Scenario>(scenario);
  std::vector<Episode> episodes;
  for (auto s : seeds) episodes.push_back({shared, s});
  return replicate(episodes, spec, T, std::move(checkpoints), jobs);
}

// Least-squares slope of ln(regret) against ln(t) over the trailing `window`
// fraction of the checkpoints.
inline double sublinearity_slope(const AggregateCurve& curve, double window = 0.5) {
  if (!(window > 0.0 && window <= 1.0)) throw SlopeUndefined("window must lie in (0, 1]");
  const std::size_t n = curve.checkpoints.size();
  const auto take = std::min<std::size_t>(n, std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(window * n))));
  if (n < 2) throw SlopeUndefined("need at least two checkpoints");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = n - take; i < n; ++i) {
    if (!(curve.mean[i] > 0.0)) {
      throw SlopeUndefined("regret is not positive at t=" + std::to_string(curve.checkpoints[i]));
    }
    const double x = std::log(static_cast<double>(curve.checkpoints[i]));
    const double y = std::log(curve.mean[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(take);
  const double denom = m * sxx - sx * sx;
  if (denom <= 0.0) throw SlopeUndefined("checkpoints in the window are not distinct");
  return (m * sxy - sx * sy) / denom;
}

}  // namespace impact
