#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <type_traits>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "impact/errors.hpp"
#include "impact/rng.hpp"
#include "impact/simplex.hpp"

namespace impact {

// r_k(x) = exp(-(x - center_k)^2): a Gaussian pdf with variance 1/2 divided by
// its peak value, so r_k(center_k) = 1.
struct ScaledGaussian {
  std::vector<double> centers;
};

// Two-arm piecewise-linear instance on which mean-converging learners lock
// onto arm 1. The optimum is (1 - epsilon, epsilon) with utility 1 - epsilon/2.
struct LockInInstance {
  double epsilon = 0.2;
};

// Flat 1/2 everywhere except a Lipschitz bump of height `height` at peaks[k].
struct BumpInstance {
  std::vector<double> peaks;
  double height = 0.0;
  std::vector<double> slopes;
};

// Piecewise-linear interpolation through (x, mean) knots spanning [0, 1].
struct TabulatedCurves {
  std::vector<std::vector<std::pair<double, double>>> knots;
};

using RewardFamily = std::variant<ScaledGaussian, LockInInstance, BumpInstance, TabulatedCurves>;

class RewardModel {
 public:
  RewardModel(RewardFamily family, std::vector<double> lipschitz)
      : family_(std::move(family)), lipschitz_(std::move(lipschitz)) {
    if (lipschitz_.size() != arms()) {
      throw DimensionMismatch("one Lipschitz constant per arm is required");
    }
  }

  std::size_t arms() const {
    return std::visit(
        [](const auto& f) -> std::size_t {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, ScaledGaussian>) return f.centers.size();
          else if constexpr (std::is_same_v<F, LockInInstance>) return 2;
          else if constexpr (std::is_same_v<F, BumpInstance>) return f.peaks.size();
          else return f.knots.size();
        },
        family_);
  }

  std::string_view kind() const {
    return std::visit(
        [](const auto& f) -> std::string_view {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, ScaledGaussian>) return "gaussian";
          else if constexpr (std::is_same_v<F, LockInInstance>) return "example1";
          else if constexpr (std::is_same_v<F, BumpInstance>) return "bump";
          else return "table";
        },
        family_);
  }

  const RewardFamily& family() const noexcept { return family_; }
  const std::vector<double>& lipschitz() const noexcept { return lipschitz_; }
  double max_lipschitz() const { return *std::max_element(lipschitz_.begin(), lipschitz_.end()); }

  // Mean reward of arm k when its impact is x.
  double mean(std::size_t k, double x) const {
    if (k >= arms()) throw DimensionMismatch("arm index out of range");
    if (!(x >= -1e-12 && x <= 1.0 + 1e-12)) {
      throw DomainError("reward input must lie in [0, 1], got " + std::to_string(x));
    }
    x = std::clamp(x, 0.0, 1.0);
    return std::visit([&](const auto& f) { return evaluate(f, k, x); }, family_);
  }

  // U(p) = sum_k p_k r_k(p_k): the per-round utility of deploying p forever.
  double utility(std::span<const double> p) const {
    if (p.size() != arms()) throw DimensionMismatch("strategy size does not match arm count");
    double u = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) u += p[k] * mean(k, p[k]);
    return u;
  }
  double utility(const MetaArm& p) const { return utility(p.probs()); }

 private:
  static double evaluate(const ScaledGaussian& f, std::size_t k, double x) {
    const double d = x - f.centers[k];
    return std::exp(-d * d);
  }

  static double evaluate(const LockInInstance& f, std::size_t k, double x) {
    const double e = f.epsilon;
    if (k == 0) return x <= 1.0 - e ? x / (1.0 - e) : 2.0 - e - x;
    return x <= e ? x / (2.0 * e) : -0.5 * x + 0.5 * (1.0 + e);
  }

  static double evaluate(const BumpInstance& f, std::size_t k, double x) {
    return 0.5 + std::max(0.0, f.height - f.slopes[k] * std::abs(x - f.peaks[k]));
  }

  static double evaluate(const TabulatedCurves& f, std::size_t k, double x) {
    const auto& pts = f.knots[k];
    auto hi = std::lower_bound(pts.begin(), pts.end(), x,
                               [](const auto& pt, double v) { return pt.first < v; });
    if (hi == pts.begin()) return hi->second;
    if (hi == pts.end()) return pts.back().second;
    const auto lo = std::prev(hi);
    const double w = (x - lo->first) / (hi->first - lo->first);
    return lo->second + w * (hi->second - lo->second);
  }

  RewardFamily family_;
  std::vector<double> lipschitz_;
};

// sup over x in [0,1] of |d/dx exp(-(x - c)^2)|.
inline double gaussian_lipschitz(double center) {
  const double reach = std::max(center, 1.0 - center);
  const double d = std::min(reach, 1.0 / std::sqrt(2.0));
  return 2.0 * d * std::exp(-d * d);
}

inline RewardModel make_gaussian_model(std::vector<double> centers) {
  if (centers.empty()) throw DomainError("gaussian model needs at least one arm");
  std::vector<double> lip;
  for (double c : centers) {
    if (!(c >= 0.0 && c <= 1.0)) throw DomainError("gaussian centers must lie in [0, 1]");
    lip.push_back(gaussian_lipschitz(c));
  }
  return RewardModel(ScaledGaussian{std::move(centers)}, std::move(lip));
}

// Centers drawn uniformly from [0.45, 0.55].
inline RewardModel make_gaussian_instance(std::size_t K, Rng& rng) {
  std::vector<double> centers(K);
  for (auto& c : centers) c = 0.45 + 0.1 * rng.uniform();
  return make_gaussian_model(std::move(centers));
}

// Slopes are 1/(1-e) and 1/(2e); both exceed 1 for the usual e.
inline RewardModel make_example1_model(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw DomainError("example1 epsilon must lie in (0, 1/2)");
  return RewardModel(LockInInstance{epsilon}, {1.0 / (1.0 - epsilon), 1.0 / (2.0 * epsilon)});
}

inline RewardModel make_bump_model(std::vector<double> peaks, double height, std::vector<double> slopes) {
  if (peaks.size() != slopes.size()) throw DimensionMismatch("bump peaks and slopes differ in size");
  if (!(height >= 0.0 && height <= 0.5)) throw DomainError("bump height must lie in [0, 1/2]");
  for (double s : slopes) {
    if (!(s > 0.0)) throw DomainError("bump slopes must be positive");
  }
  double total = 0.0;
  for (double p : peaks) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("bump peaks must lie in [0, 1]");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw DomainError("bump peaks must sum to 1");
  auto lip = slopes;
  return RewardModel(BumpInstance{std::move(peaks), height, std::move(slopes)}, std::move(lip));
}

inline RewardModel make_table_model(std::vector<std::vector<std::pair<double, double>>> knots) {
  std::vector<double> lip;
  for (auto& arm : knots) {
    if (arm.size() < 2) throw DomainError("each tabulated arm needs at least two knots");
    std::sort(arm.begin(), arm.end());
    if (arm.front().first != 0.0 || arm.back().first != 1.0) {
      throw DomainError("tabulated knots must span [0, 1]");
    }
    double slope = 0.0;
    for (std::size_t i = 0; i < arm.size(); ++i) {
      if (!(arm[i].second >= 0.0 && arm[i].second <= 1.0)) {
        throw DomainError("tabulated means must lie in [0, 1]");
      }
      if (i > 0) {
        const double dx = arm[i].first - arm[i - 1].first;
        if (!(dx > 0.0)) throw DomainError("tabulated knots must have distinct inputs");
        slope = std::max(slope, std::abs(arm[i].second - arm[i - 1].second) / dx);
      }
    }
    // A flat arm is still 1-Lipschitz for any positive constant; keep it nonzero.
    lip.push_back(std::max(slope, 1e-12));
  }
  return RewardModel(TabulatedCurves{std::move(knots)}, std::move(lip));
}

// Number of valid peak vectors for a bump instance: peaks are odd multiples of
// epsilon = 1/m summing to 1, i.e. compositions of (m + K)/2 into K parts.
// Returns the grid those compositions live on, or nothing when infeasible.
inline std::optional<SimplexGrid> bump_peak_grid(std::size_t K, double epsilon) {
  if (K < 2) throw InfeasibleInstance("bump instances need K >= 2");
  if (!(epsilon > 0.0 && epsilon <= 0.5)) throw InfeasibleInstance("bump epsilon must lie in (0, 1/2]");
  const double m_real = 1.0 / epsilon;
  const long m = std::lround(m_real);
  if (std::abs(m * epsilon - 1.0) > 1e-9) return std::nullopt;
  const long twice = m + static_cast<long>(K);
  if (twice % 2 != 0 || twice / 2 < static_cast<long>(K)) return std::nullopt;
  return SimplexGrid(K, static_cast<int>(twice / 2));
}

// Every valid peak vector p*_k = (2 j_k - 1) epsilon, in lexicographic order.
inline std::vector<std::vector<double>> enumerate_bump_peaks(std::size_t K, double epsilon) {
  const auto grid = bump_peak_grid(K, epsilon);
  if (!grid) {
    throw InfeasibleInstance("no composition of 1 into odd multiples of epsilon exists for K=" +
                             std::to_string(K));
  }
  std::vector<std::vector<double>> out;
  for_each_composition(*grid, [&](const std::vector<int>& js) {
    std::vector<double> peaks;
    for (int j : js) peaks.push_back((2.0 * j - 1.0) * epsilon);
    out.push_back(std::move(peaks));
    return true;
  });
  return out;
}

// Draws one valid peak vector uniformly; every arm gets slope 1.
inline RewardModel make_bump_instance(std::size_t K, double epsilon, Rng& rng) {
  auto candidates = enumerate_bump_peaks(K, epsilon);
  auto& peaks = candidates[rng.below(candidates.size())];
  return make_bump_model(std::move(peaks), epsilon, std::vector<double>(K, 1.0));
}

}  // namespace impact
