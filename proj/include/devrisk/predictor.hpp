#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "devrisk/ar.hpp"
#include "devrisk/arima.hpp"
#include "devrisk/changepoint.hpp"
#include "devrisk/forecast.hpp"

namespace devrisk {

/// Declaration order doubles as the tie-break order in predictor selection.
enum class Predictor { AR, SMA, ARIMA, TREND };

inline constexpr Predictor kAllPredictors[] = {Predictor::AR, Predictor::SMA, Predictor::ARIMA, Predictor::TREND};

std::string_view to_string(Predictor predictor);
/// Accepts the lower-case CLI names: ar, sma, arima, trend.
Predictor parse_predictor(std::string_view name);
ModelTag model_tag(Predictor predictor);

struct ForecastConfig {
  int ar_max_lag = kDefaultArMaxLag;
  int sma_max_window = kDefaultSmaMaxWindow;
  ArimaSearchConfig arima;
  TrendConfig trend;
};

enum class SeriesKind { PatchInterval, Severity };

struct ForecastBounds {
  double floor = 0.0;
  std::optional<double> ceiling;
};

/// Patch intervals are floored at 0; severities are kept within the CVSS range.
ForecastBounds bounds_for(SeriesKind kind);

/// Fits `predictor` on `train` with its automatic per-series parameter search
/// and forecasts one value per horizon date (clamped to `kind`'s bounds).
/// SMA, AR and ARIMA index the series by event order; TREND uses the dates.
ForecastResult forecast_series(Predictor predictor, std::span<const SeriesPoint> train,
                               std::span<const Date> horizon_dates, SeriesKind kind, const ForecastConfig& config = {});

/// `horizon` dates after the last observation, spaced by the median gap
/// between observations (at least one day).
std::vector<Date> future_dates(std::span<const SeriesPoint> history, int horizon);

}  // namespace devrisk
