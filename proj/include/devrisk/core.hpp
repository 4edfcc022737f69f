#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "devrisk/error.hpp"

namespace devrisk {

/// Calendar date at day granularity, stored as days since 1970-01-01.
class Date {
 public:
  Date() = default;

  static Date from_day_number(std::int64_t days) { return Date(days); }
  static Date from_ymd(int year, unsigned month, unsigned day);

  /// Strict `YYYY-MM-DD`. Throws Error(InvalidArgument) on anything else.
  static Date parse(std::string_view iso);
  static std::optional<Date> try_parse(std::string_view iso);

  std::string to_string() const;
  std::int64_t day_number() const { return days_; }
  /// 1-based ordinal day within the year.
  int day_of_year() const;
  Date plus_days(std::int64_t n) const { return Date(days_ + n); }

  friend auto operator<=>(const Date&, const Date&) = default;

 private:
  explicit Date(std::int64_t days) : days_(days) {}
  std::int64_t days_ = 0;
};

enum class DeviceCategory { CCTV, Streaming, Switch, Speaker, Controller, IP2Serial, Other };

inline constexpr DeviceCategory kAllDeviceCategories[] = {
    DeviceCategory::CCTV,       DeviceCategory::Streaming, DeviceCategory::Switch,
    DeviceCategory::Speaker,    DeviceCategory::Controller, DeviceCategory::IP2Serial,
    DeviceCategory::Other};

std::string_view to_string(DeviceCategory category);
/// Case-sensitive match on the names produced by to_string().
DeviceCategory parse_device_category(std::string_view text);

struct DeviceModel {
  std::string id;
  std::string vendor;
  std::string name;
  DeviceCategory category = DeviceCategory::Other;

  /// Key used to match CVE feed products: `vendor:name`.
  std::string product_key() const { return vendor + ":" + name; }

  friend bool operator==(const DeviceModel&, const DeviceModel&) = default;
};

/// Device ids double as file names inside a workspace.
bool is_valid_device_id(std::string_view id);
bool is_valid_cve_id(std::string_view id);

struct VulnerabilityRecord {
  std::string cve_id;
  Date published;
  double cvss_v2 = 0.0;

  friend bool operator==(const VulnerabilityRecord&, const VulnerabilityRecord&) = default;
};

struct PatchEvent {
  std::string cve_id;
  Date cve_published;
  Date patch_released;
  std::int64_t interval_days = 0;

  friend bool operator==(const PatchEvent&, const PatchEvent&) = default;
};

/// Whole days from publication to patch. Throws NegativeInterval when the
/// patch predates the publication.
std::int64_t compute_patch_interval(Date cve_published, Date patch_released);

PatchEvent make_patch_event(std::string cve_id, Date cve_published, Date patch_released);

struct SeriesPoint {
  Date date;
  double value = 0.0;

  friend bool operator==(const SeriesPoint&, const SeriesPoint&) = default;
};

struct DatedSeries {
  std::string device_id;
  std::vector<SeriesPoint> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  std::vector<double> values() const;
  std::vector<Date> dates() const;

  friend bool operator==(const DatedSeries&, const DatedSeries&) = default;
};

/// Patch latency (days) keyed by CVE publication date.
struct PatchIntervalSeries : DatedSeries {};
/// CVSS v2 severities keyed by CVE publication date.
struct SeveritySeries : DatedSeries {};

template <typename T>
struct EvaluationSplit {
  std::vector<T> train;
  std::vector<T> test;
  double ratio = 0.66;
};

inline constexpr double kDefaultSplitRatio = 0.66;

/// max(2, round-half-up(ratio * n)), capped at n - 1. Throws TooFewPoints for n < 3.
std::size_t split_train_size(std::size_t n, double ratio = kDefaultSplitRatio);

template <typename T>
EvaluationSplit<T> train_test_split(std::span<const T> series, double ratio = kDefaultSplitRatio) {
  const std::size_t n_train = split_train_size(series.size(), ratio);
  EvaluationSplit<T> split;
  split.ratio = ratio;
  split.train.assign(series.begin(), series.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.test.assign(series.begin() + static_cast<std::ptrdiff_t>(n_train), series.end());
  return split;
}

template <typename T>
EvaluationSplit<T> train_test_split(const std::vector<T>& series, double ratio = kDefaultSplitRatio) {
  return train_test_split(std::span<const T>(series), ratio);
}

double series_median(std::span<const double> values);

inline double series_median(const std::vector<double>& values) {
  return series_median(std::span<const double>(values));
}

double series_mean(std::span<const double> values);

}  // namespace devrisk
