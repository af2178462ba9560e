#pragma once

#include <algorithm>
#include <cmath>

#include "impact/reward_model.hpp"
#include "impact/simplex.hpp"

namespace impact {

struct FixedStrategy {
  MetaArm arm;
  double utility = 0.0;
};

// Exhaustive search of U(p) over a grid. Deploying p from round 1 keeps the
// impact equal to p, so T * U(p*) is the benchmark for pseudo-regret. Ties
// resolve to the lexicographically first grid point.
inline FixedStrategy best_fixed_strategy(const RewardModel& model, const SimplexGrid& grid) {
  if (grid.arms() != model.arms()) throw DimensionMismatch("grid and model arm counts differ");
  const double n = grid.levels();
  std::vector<int> best;
  double best_u = -1.0;
  std::vector<double> probs(grid.arms());
  for_each_composition(grid, [&](const std::vector<int>& levels) {
    double u = 0.0;
    for (std::size_t k = 0; k < levels.size(); ++k) {
      const double p = levels[k] / n;
      u += p * model.mean(k, p);
    }
    if (u > best_u) {
      best_u = u;
      best = levels;
    }
    return true;
  });
  return {MetaArm::from_levels(std::move(best), grid.levels()), best_u};
}

inline FixedStrategy best_fixed_strategy(const RewardModel& model, double resolution) {
  return best_fixed_strategy(model, make_grid(model.arms(), resolution));
}

// Default oracle resolution for a policy grid with n levels: the coarsest grid
// 1/(n*m) that is at least as fine as min(1/(4n), 1/200). Being a refinement of
// the policy grid, the oracle never scores below the discretized optimum.
inline int default_benchmark_levels(int policy_levels) {
  const int m = std::max(4, (200 + policy_levels - 1) / policy_levels);
  return policy_levels * m;
}

}  // namespace impact
