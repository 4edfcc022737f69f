#include "devrisk/predictor.hpp"

#include <cmath>

namespace devrisk {

std::string_view to_string(Predictor predictor) {
  switch (predictor) {
    case Predictor::AR: return "AR";
    case Predictor::SMA: return "SMA";
    case Predictor::ARIMA: return "ARIMA";
    case Predictor::TREND: return "TREND";
  }
  return "AR";
}

Predictor parse_predictor(std::string_view name) {
  if (name == "ar") return Predictor::AR;
  if (name == "sma") return Predictor::SMA;
  if (name == "arima") return Predictor::ARIMA;
  if (name == "trend") return Predictor::TREND;
  throw Error(ErrorCode::InvalidArgument, "unknown predictor '" + std::string(name) + "'");
}

ModelTag model_tag(Predictor predictor) {
  switch (predictor) {
    case Predictor::AR: return ModelTag::AR;
    case Predictor::SMA: return ModelTag::SMA;
    case Predictor::ARIMA: return ModelTag::ARIMA;
    case Predictor::TREND: return ModelTag::TREND;
  }
  return ModelTag::AR;
}

ForecastBounds bounds_for(SeriesKind kind) {
  if (kind == SeriesKind::Severity) return {kCvssFloor, kCvssCeiling};
  return {0.0, std::nullopt};
}

namespace {

// Same-day observations are averaged so the trend model sees strictly
// increasing dates.
std::vector<SeriesPoint> collapse_ties(std::span<const SeriesPoint> points) {
  std::vector<SeriesPoint> out;
  std::size_t count = 0;
  for (const auto& p : points) {
    if (!out.empty() && out.back().date == p.date) {
      ++count;
      out.back().value += (p.value - out.back().value) / static_cast<double>(count);
    } else {
      out.push_back(p);
      count = 1;
    }
  }
  return out;
}

ForecastResult constant_forecast(double value, std::size_t horizon, ModelTag tag) {
  ForecastResult out;
  out.model_tag = tag;
  out.values.assign(horizon, value);
  return out;
}

ForecastResult trend_forecast(std::span<const SeriesPoint> train, std::span<const Date> horizon_dates,
                              const TrendConfig& config) {
  const auto collapsed = collapse_ties(train);
  if (collapsed.size() < 2) {
    std::vector<double> values;
    for (const auto& p : train) values.push_back(p.value);
    return constant_forecast(series_mean(values), horizon_dates.size(), ModelTag::TREND);
  }
  if (collapsed.size() == 2) {
    const auto model = fit_trend_fixed_tau(collapsed, config.tau_grid.front(), config);
    ForecastResult out;
    out.model_tag = ModelTag::TREND;
    out.values = model.predict(horizon_dates);
    return out;
  }
  return fit_trend_model(collapsed, horizon_dates, config).forecast;
}

}  // namespace

ForecastResult forecast_series(Predictor predictor, std::span<const SeriesPoint> train,
                               std::span<const Date> horizon_dates, SeriesKind kind, const ForecastConfig& config) {
  if (train.empty()) throw Error(ErrorCode::EmptyInput, "cannot forecast from an empty series");
  if (horizon_dates.empty()) throw Error(ErrorCode::InvalidArgument, "forecast horizon must be >= 1");
  const int horizon = static_cast<int>(horizon_dates.size());

  std::vector<double> values;
  values.reserve(train.size());
  for (const auto& p : train) values.push_back(p.value);

  ForecastResult raw;
  switch (predictor) {
    case Predictor::SMA: {
      const int window = select_sma_window(values, config.sma_max_window);
      raw = sma_forecast(values, window, horizon);
      break;
    }
    case Predictor::AR: {
      const auto model = fit_ar(values, ar_lag_limit(values.size(), config.ar_max_lag));
      raw = ar_forecast(model, values, horizon);
      break;
    }
    case Predictor::ARIMA: {
      const auto model = auto_arima(values, config.arima);
      raw = arima_forecast(model, values, horizon);
      break;
    }
    case Predictor::TREND:
      raw = trend_forecast(train, horizon_dates, config.trend);
      break;
  }
  const ForecastBounds bounds = bounds_for(kind);
  return clamp_forecast(std::move(raw), bounds.floor, bounds.ceiling);
}

std::vector<Date> future_dates(std::span<const SeriesPoint> history, int horizon) {
  if (history.empty()) throw Error(ErrorCode::EmptyInput, "no history to extend");
  std::int64_t step = 1;
  if (history.size() >= 2) {
    std::vector<double> gaps;
    for (std::size_t i = 1; i < history.size(); ++i) {
      gaps.push_back(static_cast<double>(history[i].date.day_number() - history[i - 1].date.day_number()));
    }
    step = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::llround(series_median(gaps))));
  }
  std::vector<Date> out;
  out.reserve(static_cast<std::size_t>(std::max(horizon, 0)));
  for (int h = 1; h <= horizon; ++h) out.push_back(history.back().date.plus_days(step * h));
  return out;
}

}  // namespace devrisk
