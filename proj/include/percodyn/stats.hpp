#pragma once

#include <cmath>
#include <cstdint>
#include <span>

namespace percodyn {

struct Estimate {
  double mean = 0.0;
  double se = 0.0;
  std::int64_t count = 0;
};

/// Sample mean and standard error, summed in index order.
inline Estimate summarize(std::span<const double> values) {
  Estimate out;
  out.count = static_cast<std::int64_t>(values.size());
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / values.size();
  if (values.size() < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.se = std::sqrt(ss / (values.size() - 1) / values.size());
  return out;
}

/// |observed - expected| in units of the standard error (0 when both agree
/// exactly with zero spread).
inline double z_score(const Estimate& e, double expected) {
  const double gap = std::abs(e.mean - expected);
  if (e.se == 0.0) return gap == 0.0 ? 0.0 : INFINITY;
  return gap / e.se;
}

}  // namespace percodyn
