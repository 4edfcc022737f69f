#include <doctest.h>

#include <random>

#include "devrisk/predictor.hpp"
#include "devrisk/report.hpp"
#include "../support/expect.hpp"
#include "../support/simulate.hpp"

using namespace devrisk;
using testing::error_code_of;

TEST_CASE("histogram") {
  const auto single = histogram(std::vector<double>{0.0});
  REQUIRE(single.size() == 60);
  CHECK(single[0].count == 1);
  CHECK(single[0].upper == 1.0);

  const auto h = histogram(std::vector<double>{0, 30, 60, 60});
  CHECK(h.size() == 60);
  CHECK(h[0].count == 1);
  CHECK(h[30].count == 1);
  CHECK(h[59].count == 2);
  int total = 0;
  for (const auto& b : h) total += b.count;
  CHECK(total == 4);
  CHECK(histogram(std::vector<double>{}).size() == 60);

  const auto csv = histogram_csv(h);
  CHECK(csv.starts_with("bin,lower,upper,count\n0,"));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 61);
}

TEST_CASE("quantiles and summaries") {
  const std::vector<double> v{316, 634, 1170};
  CHECK(quantile(v, 0.5) == 634);
  CHECK(quantile(v, 0.25) == doctest::Approx(475));
  CHECK(quantile(v, 1.0) == 1170);
  const auto s = summarize(v);
  REQUIRE(s);
  CHECK(s->median == 634);
  CHECK(s->min == 316);
  CHECK_FALSE(summarize(std::vector<double>{}));
  CHECK(error_code_of([&] { quantile(v, 1.5); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("corpus summary") {
  DatasetWorkspace ws;
  PatchIntervalSeries p;
  SeveritySeries s;
  p.device_id = s.device_id = "a";
  p.points = {{Date::parse("2020-01-01"), 0.0}};
  s.points = {{Date::parse("2020-01-01"), 5.0}, {Date::parse("2020-02-01"), 7.0}};
  ws.add_device({"a", "v", "m", DeviceCategory::Other}, p, s);
  PatchIntervalSeries p2;
  SeveritySeries s2;
  p2.device_id = s2.device_id = "b";
  s2.points = {{Date::parse("2020-01-01"), 2.0}};
  ws.add_device({"b", "v", "n", DeviceCategory::Other}, p2, s2);

  const auto summary = collect_corpus_summary(ws);
  CHECK(summary.devices == 2);
  CHECK(summary.devices_without_patches == 1);
  CHECK(summary.devices_with_multiple_vulns == 1);
  CHECK(patch_interval_histogram(summary)[0].count == 1);
  const auto vh = vulns_per_device_histogram(summary);
  int total = 0;
  for (const auto& b : vh) total += b.count;
  CHECK(total == 1);
  const auto text = format_corpus_summary(summary);
  CHECK(text.find("q1=") != std::string::npos);
}

TEST_CASE("predictor names") {
  CHECK(parse_predictor("ar") == Predictor::AR);
  CHECK(parse_predictor("trend") == Predictor::TREND);
  CHECK(to_string(Predictor::ARIMA) == "ARIMA");
  CHECK(error_code_of([] { parse_predictor("lstm"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("forecast_series respects bounds for every predictor") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> z(0, 1);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> y(25);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::clamp(9.5 + 0.05 * i + 0.5 * z(rng), 0.0, 10.0);
    const auto pts = sim::daily(y, Date::parse("2017-01-01"), 20);
    const auto horizon = future_dates(pts, 30);
    CHECK(horizon.size() == 30);
    CHECK(horizon.front() > pts.back().date);
    for (Predictor p : kAllPredictors) {
      const auto f = forecast_series(p, pts, horizon, SeriesKind::Severity);
      REQUIRE(f.values.size() == 30);
      CHECK(f.model_tag == model_tag(p));
      for (double v : f.values) {
        REQUIRE(v >= 0.0);
        REQUIRE(v <= 10.0);
      }
    }
  }
}

TEST_CASE("trend forecasts average same-day points") {
  const Date d = Date::parse("2019-06-01");
  const std::vector<SeriesPoint> pts{{d, 10}, {d, 20}, {d.plus_days(10), 15}, {d.plus_days(20), 15}};
  const auto f = forecast_series(Predictor::TREND, pts, std::vector<Date>{d.plus_days(30)}, SeriesKind::PatchInterval);
  CHECK(f.values[0] == doctest::Approx(15.0).epsilon(1e-6));
}
