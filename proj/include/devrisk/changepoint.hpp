#pragma once

#include <span>
#include <vector>

#include "devrisk/core.hpp"
#include "devrisk/forecast.hpp"

namespace devrisk {

enum class SeasonalityMode { None, MultiplicativeYearly };

struct TrendConfig {
  /// Changepoint prior scales searched; the L1 weight on slope changes is 1/tau.
  std::vector<double> tau_grid{0.01, 0.1, 0.5, 1.0, 2.1};
  int n_changepoints = 25;
  /// Changepoints are spread uniformly over this leading fraction of the span.
  double changepoint_range = 0.8;
  SeasonalityMode seasonality = SeasonalityMode::MultiplicativeYearly;
  /// Yearly seasonality is only fitted when the training span exceeds this.
  int seasonality_min_span_days = 730;
  int fourier_order = 3;
  int max_sweeps = 20000;
  double tolerance = 1e-10;
};

/// Piecewise-linear trend on a [0, 1] time axis (0 = first training date,
/// 1 = last) with values scaled by y_scale:
///   trend(t) = k t + m + sum_j delta_j (t - s_j)_+
/// which equals (k + a(t)'delta) t + m + a(t)'gamma with gamma_j = -s_j delta_j.
/// With seasonality active the prediction is trend(t) * (1 + fourier(date)'beta).
struct ChangepointTrendModel {
  Date origin;
  double span_days = 1.0;
  double y_scale = 1.0;
  double k = 0.0;
  double m = 0.0;
  std::vector<double> changepoints;
  std::vector<double> deltas;
  double tau = 0.0;
  SeasonalityMode seasonality = SeasonalityMode::None;
  bool seasonality_active = false;
  std::vector<double> seasonal_coef;

  double scaled_time(Date date) const;
  double trend_scaled(double t) const;
  double predict(Date date) const;
  std::vector<double> predict(std::span<const Date> dates) const;
  /// Trend slope in value units per day at `date` (seasonality excluded).
  double slope_per_day(Date date) const;
};

struct TrendFit {
  ChangepointTrendModel model;
  ForecastResult forecast;
  /// Validation MAD for each tau in the grid (empty when no validation slice
  /// was available).
  std::vector<double> validation_mad;
};

/// Fits one tau. Requires at least 2 points with strictly increasing dates.
ChangepointTrendModel fit_trend_fixed_tau(std::span<const SeriesPoint> train, double tau,
                                          const TrendConfig& config = {});

/// Selects tau by MAD on the last 34% of `train` (after fitting on the first
/// 66%), refits on all of `train`, and forecasts at `horizon_dates`.
/// Requires |train| >= 3 and strictly increasing dates; throws DegenerateDates
/// when the dates span zero days.
TrendFit fit_trend_model(std::span<const SeriesPoint> train, std::span<const Date> horizon_dates,
                         const TrendConfig& config = {});

}  // namespace devrisk
