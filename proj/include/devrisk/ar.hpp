#pragma once

#include <span>
#include <vector>

#include "devrisk/forecast.hpp"

namespace devrisk {

/// Autoregression with constant: y_t = c + sum_i phi_i * y_{t-i} + e_t.
/// lag_order == 0 is the intercept-only (mean) model.
struct ArModel {
  int lag_order = 0;
  std::vector<double> coefficients;
  double intercept = 0.0;
  double fit_aic = 0.0;
  /// Number of regression rows behind the final fit.
  int nobs = 0;

  friend bool operator==(const ArModel&, const ArModel&) = default;
};

inline constexpr int kDefaultArMaxLag = 12;

/// Lag selection by AIC over p = 0..max_lag on the common sample
/// (rows t >= max_lag), then an OLS refit of the winner on all of its usable
/// rows. Lags whose design is singular are skipped; if none survives the mean
/// model is returned. Requires |train| >= max_lag + 2.
ArModel fit_ar(std::span<const double> train, int max_lag);

/// OLS fit at a fixed lag order. Throws SingularDesign for collinear lags.
ArModel fit_ar_order(std::span<const double> train, int lag_order);

/// Largest lag order the pipeline tries for a series of this length.
int ar_lag_limit(std::size_t n, int configured_max = kDefaultArMaxLag);

/// Iterates c + sum phi_i * y_{t-i}, feeding forecasts back in.
ForecastResult ar_forecast(const ArModel& model, std::span<const double> train_tail, int horizon);

}  // namespace devrisk
