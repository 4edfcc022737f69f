#include "devrisk/adf.hpp"

#include <cmath>
#include <limits>
#include <vector>
#include <string>

#include "devrisk/error.hpp"
#include "ols.hpp"

namespace devrisk {

namespace {

// Response-surface coefficients tau = b_inf + b1/T + b2/T^2 + b3/T^3 for the
// single-series, constant-only case. Source: J. G. MacKinnon (2010),
// "Critical Values for Cointegration Tests", Queen's Economics Department
// Working Paper No. 1227, Table 2 (N = 1, "c").
struct ResponseSurface {
  double b_inf, b1, b2, b3;
};

constexpr ResponseSurface kConstantOnly[] = {
    {-3.43035, -6.5393, -16.786, -79.433},  // 1%
    {-2.86154, -2.8903, -4.234, -40.040},   // 5%
    {-2.56677, -1.5384, -2.809, 0.0},       // 10%
};

constexpr int kMinResidualDof = 8;

}  // namespace

double mackinnon_critical_value(int nobs, AdfLevel level) {
  const ResponseSurface& c = kConstantOnly[static_cast<int>(level)];
  const double t = static_cast<double>(nobs);
  return c.b_inf + c.b1 / t + c.b2 / (t * t) + c.b3 / (t * t * t);
}

int schwert_max_lag(std::size_t n) {
  return static_cast<int>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

namespace {

// Rows of the ADF regression with `lags` lagged differences, starting at
// dy index `first` (dy index j corresponds to time t = j + 1).
void adf_design(std::span<const double> series, const std::vector<double>& dy, int lags, int first,
                Eigen::MatrixXd& X, Eigen::VectorXd& y) {
  const int rows = static_cast<int>(dy.size()) - first;
  X.resize(rows, lags + 2);
  y.resize(rows);
  for (int r = 0; r < rows; ++r) {
    const int j = first + r;
    y(r) = dy[static_cast<std::size_t>(j)];
    X(r, 0) = 1.0;
    X(r, 1) = series[static_cast<std::size_t>(j)];  // y_{t-1}
    for (int i = 1; i <= lags; ++i) X(r, 1 + i) = dy[static_cast<std::size_t>(j - i)];
  }
}

}  // namespace

AdfResult adf_test(std::span<const double> series, AdfLagRule rule) {
  const int n = static_cast<int>(series.size());
  if (n < 10) throw Error(ErrorCode::TooShort, "ADF test needs at least 10 points, got " + std::to_string(n));

  // rows = n - 1 - L, params = L + 2, dof = n - 3 - 2L
  int max_lags = schwert_max_lag(series.size());
  while (max_lags > 0 && n - 3 - 2 * max_lags < kMinResidualDof) --max_lags;

  std::vector<double> dy(static_cast<std::size_t>(n - 1));
  for (int t = 1; t < n; ++t) dy[static_cast<std::size_t>(t - 1)] = series[t] - series[t - 1];

  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  int lags = max_lags;
  if (rule == AdfLagRule::Aic && max_lags > 0) {
    double best_aic = std::numeric_limits<double>::infinity();
    for (int L = 0; L <= max_lags; ++L) {
      adf_design(series, dy, L, max_lags, X, y);
      const auto fit = detail::ols(X, y);
      if (!fit) continue;
      const double aic = detail::aic_from_sse(fit->sse, X.rows(), L + 2, y.squaredNorm() / static_cast<double>(y.size()));
      if (aic < best_aic) {
        best_aic = aic;
        lags = L;
      }
    }
  }
  adf_design(series, dy, lags, lags, X, y);
  const int rows = static_cast<int>(X.rows());

  AdfResult result;
  result.lags = lags;
  result.nobs = rows;
  result.critical_value_5pct = mackinnon_critical_value(rows);

  const auto fit = detail::ols(X, y);
  const double scale = y.squaredNorm() + X.col(1).squaredNorm();
  if (!fit || !(fit->sse > 1e-20 * (1.0 + scale)) || !std::isfinite(fit->std_err(1)) || fit->std_err(1) <= 0.0) {
    // Singular or exact fit: no evidence against a unit root.
    result.degenerate = true;
    result.statistic = 0.0;
    result.reject_unit_root = false;
    return result;
  }
  result.statistic = fit->coef(1) / fit->std_err(1);
  result.reject_unit_root = result.statistic < result.critical_value_5pct;
  return result;
}

}  // namespace devrisk
