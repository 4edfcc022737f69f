#pragma once

#include <span>
#include <vector>

#include "devrisk/forecast.hpp"

namespace devrisk {

struct ArimaOrder {
  int p = 0;
  int d = 0;
  int q = 0;

  friend bool operator==(const ArimaOrder&, const ArimaOrder&) = default;
};

/// ARMA(p, q) on the d-times differenced series w:
///   w_t = c + sum_i ar_i * w_{t-i} + e_t + sum_j ma_j * e_{t-j}
/// The intercept c is only estimated when d == 0.
struct ArimaModel {
  ArimaOrder order;
  std::vector<double> ar;
  std::vector<double> ma;
  double intercept = 0.0;
  bool has_intercept = false;
  /// Conditional sum of squares over rows t >= condition_on.
  double css = 0.0;
  double fit_aic = 0.0;
  int nobs = 0;
  /// Leading differenced observations treated as fixed pre-sample values.
  int condition_on = 0;
  int iterations = 0;
};

struct ArimaSearchConfig {
  int max_p = 12;
  int max_q = 12;
  int d_max = 2;
  bool stepwise = true;
  int max_iterations = 200;
};

std::vector<double> difference(std::span<const double> series, int d);

/// CSS innovations on the differenced series; entries before condition_on are 0.
std::vector<double> arima_residuals(const ArimaModel& model, std::span<const double> differenced);

/// Minimizes the conditional sum of squares (pre-sample innovations zero) with
/// Levenberg-Marquardt started from OLS AR estimates and zero MA terms.
/// condition_on < 0 means condition on the first p observations.
/// Throws TooShort when too few rows remain and NonConvergence when the
/// iteration cap is hit.
ArimaModel fit_arima(std::span<const double> train, ArimaOrder order, int condition_on = -1,
                     int max_iterations = 200);

/// Smallest d in 0..d_max whose d-times differenced series rejects a unit root
/// under adf_test; d_max if none does. Differencing stops early once the
/// series becomes too short to test.
int select_differencing(std::span<const double> train, int d_max);

/// d via select_differencing, then (p, q) minimizing AIC = n ln(CSS/n) + 2(p+q+1).
/// All candidates of one search condition on the same number of leading
/// observations so their AIC values share a sample. Throws TooShort for
/// |train| < 10.
ArimaOrder select_arima_order(std::span<const double> train, const ArimaSearchConfig& config = {});

/// Order search plus final fit that degrades gracefully on short series
/// (d = 0 and a reduced grid below 10 points, mean model below 3).
ArimaModel auto_arima(std::span<const double> train, const ArimaSearchConfig& config = {});

/// ARMA recursion on the differenced scale with future innovations set to 0,
/// integrated back d times against the tail of `train`.
ForecastResult arima_forecast(const ArimaModel& model, std::span<const double> train, int horizon);

}  // namespace devrisk
