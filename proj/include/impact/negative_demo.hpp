#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "impact/harness.hpp"
#include "impact/report.hpp"

namespace impact {

// Below this horizon the lock-in instance cannot separate linear from
// sublinear regret; the demo still runs but flags its summary.
inline constexpr long kDemoMinHorizon = 1000;

struct DemoLine {
  std::string policy;
  bool skipped = false;       // initialization longer than the horizon
  double regret_per_round = 0.0;  // lambda(T) / T
  double late_window = 0.0;       // (lambda(T) - lambda(T/2)) / (T - T/2)
  double slope = std::numeric_limits<double>::quiet_NaN();
};

struct DemoResult {
  long T = 0;
  int levels = 0;
  FixedStrategy benchmark;
  bool short_horizon = false;
  std::vector<LabeledCurve> curves;
  std::vector<DemoLine> lines;
};

// Mean-converging learners (Thompson Sampling, UCB1 on base arms) against the
// simplex-grid learners on the lock-in instance with gamma = 0. The policy grid
// is the automatic one, refined until it contains the optimum 1 - epsilon.
inline DemoResult negative_demo(long T, double epsilon_inst, std::uint64_t seed, std::size_t runs = 20,
                                unsigned jobs = 1) {
  if (T < 2) throw ConfigError("negative demo needs T >= 2");
  if (runs < 1) throw ConfigError("negative demo needs at least one run");
  DemoResult out;
  out.T = T;
  out.short_horizon = T < kDemoMinHorizon;
  auto model = make_example1_model(epsilon_inst);
  out.levels = aligned_levels(schedule_params(T, 2, 0.0, 0.2).levels, 1.0 - epsilon_inst);
  const auto scenario = make_scenario(model, 0.0, out.levels);
  out.benchmark = scenario.benchmark;

  const long half = T / 2;
  auto checkpoints = log_checkpoints(T);
  if (half >= 1) checkpoints.push_back(half);
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
  const auto seeds = episode_seeds(seed, runs);

  for (const char* name : {"ts", "ucb1", "hducb", "aducb"}) {
    const PolicySpec spec{name, name, {}};
    DemoLine line;
    line.policy = name;
    if (make_policy(spec, make_context(scenario, T))->init_rounds() > T) {
      line.skipped = true;
      out.lines.push_back(line);
      continue;
    }
    auto curve = replicate(scenario, spec, T, seeds, checkpoints, jobs);
    const double final = curve.mean.back();
    double at_half = 0.0;
    for (std::size_t i = 0; i < curve.checkpoints.size(); ++i) {
      if (curve.checkpoints[i] == half) at_half = curve.mean[i];
    }
    line.regret_per_round = final / static_cast<double>(T);
    line.late_window = (final - at_half) / static_cast<double>(T - half);
    try {
      line.slope = sublinearity_slope(curve, 0.5);
    } catch (const SlopeUndefined&) {
    }
    out.lines.push_back(line);
    out.curves.push_back({name, 0.0, std::move(curve)});
  }
  return out;
}

}  // namespace impact
