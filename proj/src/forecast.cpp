#include "devrisk/forecast.hpp"

#include <cmath>
#include <limits>

namespace devrisk {

std::string_view to_string(ModelTag tag) {
  switch (tag) {
    case ModelTag::SMA: return "SMA";
    case ModelTag::AR: return "AR";
    case ModelTag::ARIMA: return "ARIMA";
    case ModelTag::TREND: return "TREND";
  }
  return "SMA";
}

namespace {

void check_lengths(std::span<const double> forecast, std::span<const double> observed) {
  if (forecast.size() != observed.size() || forecast.empty()) {
    throw Error(ErrorCode::LengthMismatch, "forecast has " + std::to_string(forecast.size()) +
                                               " values, observed has " + std::to_string(observed.size()));
  }
}

}  // namespace

double rmse(std::span<const double> forecast, std::span<const double> observed) {
  check_lengths(forecast, observed);
  double sum = 0.0;
  for (std::size_t i = 0; i < forecast.size(); ++i) {
    const double e = forecast[i] - observed[i];
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(forecast.size()));
}

double mad(std::span<const double> forecast, std::span<const double> observed) {
  check_lengths(forecast, observed);
  std::vector<double> residuals(forecast.size());
  for (std::size_t i = 0; i < forecast.size(); ++i) residuals[i] = forecast[i] - observed[i];
  const double center = series_median(residuals);
  for (double& r : residuals) r = std::abs(r - center);
  return series_median(residuals);
}

ErrorMetrics error_metrics(std::span<const double> forecast, std::span<const double> observed) {
  return ErrorMetrics{rmse(forecast, observed), mad(forecast, observed)};
}

ForecastResult clamp_forecast(ForecastResult result, double floor, std::optional<double> ceiling) {
  if (ceiling && floor > *ceiling) throw Error(ErrorCode::InvalidArgument, "clamp floor exceeds ceiling");
  for (double& v : result.values) {
    if (std::isnan(v)) {
      v = floor;
      result.clamp_floor_applied = true;
    } else if (v < floor) {
      v = floor;
      result.clamp_floor_applied = true;
    } else if (ceiling && v > *ceiling) {
      v = *ceiling;
      result.clamp_ceiling_applied = true;
    }
  }
  return result;
}

ForecastResult sma_forecast(std::span<const double> train, int window, int horizon) {
  if (window < 1) throw Error(ErrorCode::InvalidArgument, "SMA window must be >= 1");
  if (horizon < 1) throw Error(ErrorCode::InvalidArgument, "forecast horizon must be >= 1");
  if (static_cast<std::size_t>(window) > train.size()) {
    throw Error(ErrorCode::WindowTooLarge, "window " + std::to_string(window) + " exceeds " +
                                               std::to_string(train.size()) + " training points");
  }
  std::vector<double> extended(train.end() - window, train.end());
  ForecastResult out;
  out.model_tag = ModelTag::SMA;
  out.values.reserve(static_cast<std::size_t>(horizon));
  for (int step = 0; step < horizon; ++step) {
    double sum = 0.0;
    for (auto it = extended.end() - window; it != extended.end(); ++it) sum += *it;
    const double next = sum / window;
    out.values.push_back(next);
    extended.push_back(next);
  }
  return out;
}

int select_sma_window(std::span<const double> train, int max_window) {
  if (train.size() < 3) return 1;
  const auto split = train_test_split(train);
  const int upper = std::min<int>(max_window, static_cast<int>(train.size()) - 1);
  const int inner_limit = static_cast<int>(split.train.size());
  int best = 1;
  double best_mad = std::numeric_limits<double>::infinity();
  for (int w = 1; w <= std::min(upper, inner_limit); ++w) {
    const auto fc = sma_forecast(split.train, w, static_cast<int>(split.test.size()));
    const double score = mad(fc.values, split.test);
    if (score < best_mad) {
      best_mad = score;
      best = w;
    }
  }
  return best;
}

}  // namespace devrisk
