#pragma once

#include <span>
#include <vector>

namespace percodyn {

struct LinearFit {
  std::vector<double> coef;
  double rms_residual = 0.0;
};

/// Ordinary least squares y ~ X beta; `columns` are the regressors
/// (include a column of ones for an intercept).
LinearFit least_squares(const std::vector<std::vector<double>>& columns,
                        std::span<const double> y);

/// Slope of log(y) against log(x).
double log_log_slope(std::span<const double> x, std::span<const double> y);

}  // namespace percodyn
