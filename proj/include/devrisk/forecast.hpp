#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "devrisk/core.hpp"

namespace devrisk {

enum class ModelTag { SMA, AR, ARIMA, TREND };

std::string_view to_string(ModelTag tag);

struct ForecastResult {
  std::vector<double> values;
  ModelTag model_tag = ModelTag::SMA;
  bool clamp_floor_applied = false;
  bool clamp_ceiling_applied = false;

  friend bool operator==(const ForecastResult&, const ForecastResult&) = default;
};

struct ErrorMetrics {
  double rmse = 0.0;
  double mad = 0.0;

  friend bool operator==(const ErrorMetrics&, const ErrorMetrics&) = default;
};

/// Root mean square error. Throws LengthMismatch on unequal or empty inputs.
double rmse(std::span<const double> forecast, std::span<const double> observed);

/// Median absolute deviation of the residuals f - o from their own median.
double mad(std::span<const double> forecast, std::span<const double> observed);

ErrorMetrics error_metrics(std::span<const double> forecast, std::span<const double> observed);

/// Clips every value into [floor, ceiling]; the flags record whether each bound bit.
ForecastResult clamp_forecast(ForecastResult result, double floor, std::optional<double> ceiling = std::nullopt);

inline constexpr double kCvssFloor = 0.0;
inline constexpr double kCvssCeiling = 10.0;

/// Recursive simple moving average: each step averages the last `window`
/// values of the train series extended by the forecasts produced so far.
ForecastResult sma_forecast(std::span<const double> train, int window, int horizon);

inline constexpr int kDefaultSmaMaxWindow = 12;

/// Searches window 1..min(max_window, |train| - 1) and returns the one whose
/// recursive forecast of the held-out tail (train split 66/34) has the lowest
/// MAD. Ties keep the smaller window. Series shorter than 3 points yield 1.
int select_sma_window(std::span<const double> train, int max_window = kDefaultSmaMaxWindow);

}  // namespace devrisk
