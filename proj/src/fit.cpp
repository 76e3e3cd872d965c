#include "percodyn/fit.hpp"

#include <cmath>
#include <Eigen/Dense>

#include "percodyn/common.hpp"

namespace percodyn {

LinearFit least_squares(const std::vector<std::vector<double>>& columns,
                        std::span<const double> y) {
  const auto rows = static_cast<Eigen::Index>(y.size());
  const auto cols = static_cast<Eigen::Index>(columns.size());
  if (rows < cols || cols == 0) throw Error("least_squares: underdetermined");
  Eigen::MatrixXd x(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    if (static_cast<Eigen::Index>(columns[c].size()) != rows)
      throw Error("least_squares: ragged columns");
    for (Eigen::Index r = 0; r < rows; ++r) x(r, c) = columns[c][r];
  }
  const Eigen::Map<const Eigen::VectorXd> rhs(y.data(), rows);
  const Eigen::VectorXd beta = x.colPivHouseholderQr().solve(rhs);
  const Eigen::VectorXd resid = rhs - x * beta;

  LinearFit fit;
  fit.coef.assign(beta.data(), beta.data() + cols);
  fit.rms_residual = std::sqrt(resid.squaredNorm() / static_cast<double>(rows));
  return fit;
}

double log_log_slope(std::span<const double> x, std::span<const double> y) {
  std::vector<double> ones(x.size(), 1.0), lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return least_squares({ones, lx}, ly).coef[1];
}

}  // namespace percodyn
