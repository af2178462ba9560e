#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "impact/harness.hpp"

namespace impact {

inline constexpr const char* kCurveHeader = "policy,gamma,t,mean_regret,std,runs";

// Nine significant digits, the frozen numeric format of every output file.
inline std::string format_sig9(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

struct LabeledCurve {
  std::string policy;
  double gamma = 0.0;
  AggregateCurve curve;
};

inline void write_curve_rows(std::ostream& out, const LabeledCurve& c) {
  for (std::size_t i = 0; i < c.curve.checkpoints.size(); ++i) {
    out << c.policy << ',' << format_sig9(c.gamma) << ',' << c.curve.checkpoints[i] << ','
        << format_sig9(c.curve.mean[i]) << ',' << format_sig9(c.curve.std[i]) << ',' << c.curve.runs << '\n';
  }
}

inline void write_csv(std::ostream& out, const std::vector<LabeledCurve>& curves) {
  out << kCurveHeader << '\n';
  for (const auto& c : curves) write_curve_rows(out, c);
}

// gnuplot data: one indexed block per policy ("plot 'f.dat' index i").
inline void write_dat(std::ostream& out, const std::vector<LabeledCurve>& curves) {
  for (std::size_t p = 0; p < curves.size(); ++p) {
    if (p) out << "\n\n";
    const auto& c = curves[p];
    out << "# policy " << c.policy << " gamma " << format_sig9(c.gamma) << " runs " << c.curve.runs << '\n';
    out << "# t mean_regret lower upper\n";
    for (std::size_t i = 0; i < c.curve.checkpoints.size(); ++i) {
      const double m = c.curve.mean[i], s = c.curve.std[i];
      out << c.curve.checkpoints[i] << ' ' << format_sig9(m) << ' ' << format_sig9(m - 2 * s) << ' '
          << format_sig9(m + 2 * s) << '\n';
    }
  }
}

}  // namespace impact
