#include "devrisk/core.hpp"

#include <chrono>
#include <charconv>
#include <cstdio>
#include <numeric>
#include <regex>

namespace devrisk {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NegativeInterval: return "NegativeInterval";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::UnknownParser: return "UnknownParser";
    case ErrorCode::MalformedBlock: return "MalformedBlock";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::DuplicateCve: return "DuplicateCve";
    case ErrorCode::UnknownCveInNote: return "UnknownCveInNote";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::CorruptWorkspace: return "CorruptWorkspace";
    case ErrorCode::WindowTooLarge: return "WindowTooLarge";
    case ErrorCode::SingularDesign: return "SingularDesign";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::DegenerateDates: return "DegenerateDates";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

namespace {

bool parse_fixed_int(std::string_view text, int& out) {
  if (text.empty()) return false;
  for (char c : text) {
    if (c < '0' || c > '9') return false;
  }
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

Date Date::from_ymd(int year, unsigned month, unsigned day) {
  using namespace std::chrono;
  const year_month_day ymd{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
  if (!ymd.ok()) {
    throw Error(ErrorCode::InvalidArgument, "invalid calendar date " + std::to_string(year) + "-" +
                                                std::to_string(month) + "-" + std::to_string(day));
  }
  return Date(sys_days{ymd}.time_since_epoch().count());
}

std::optional<Date> Date::try_parse(std::string_view iso) {
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') return std::nullopt;
  int y = 0, m = 0, d = 0;
  if (!parse_fixed_int(iso.substr(0, 4), y) || !parse_fixed_int(iso.substr(5, 2), m) ||
      !parse_fixed_int(iso.substr(8, 2), d)) {
    return std::nullopt;
  }
  using namespace std::chrono;
  const year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                           std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return Date(sys_days{ymd}.time_since_epoch().count());
}

Date Date::parse(std::string_view iso) {
  if (auto d = try_parse(iso)) return *d;
  throw Error(ErrorCode::InvalidArgument, "not an ISO-8601 date: '" + std::string(iso) + "'");
}

std::string Date::to_string() const {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{std::chrono::days{days_}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

int Date::day_of_year() const {
  using namespace std::chrono;
  const sys_days today{std::chrono::days{days_}};
  const year_month_day ymd{today};
  const sys_days jan1{ymd.year() / January / 1};
  return static_cast<int>((today - jan1).count()) + 1;
}

std::string_view to_string(DeviceCategory category) {
  switch (category) {
    case DeviceCategory::CCTV: return "CCTV";
    case DeviceCategory::Streaming: return "Streaming";
    case DeviceCategory::Switch: return "Switch";
    case DeviceCategory::Speaker: return "Speaker";
    case DeviceCategory::Controller: return "Controller";
    case DeviceCategory::IP2Serial: return "IP2Serial";
    case DeviceCategory::Other: return "Other";
  }
  return "Other";
}

DeviceCategory parse_device_category(std::string_view text) {
  for (DeviceCategory c : kAllDeviceCategories) {
    if (to_string(c) == text) return c;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown device category '" + std::string(text) + "'");
}

bool is_valid_device_id(std::string_view id) {
  if (id.empty() || id == "." || id == "..") return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' ||
           c == '_' || c == '-';
  });
}

bool is_valid_cve_id(std::string_view id) {
  static const std::regex pattern(R"(CVE-\d{4}-\d{4,})");
  return std::regex_match(id.begin(), id.end(), pattern);
}

std::int64_t compute_patch_interval(Date cve_published, Date patch_released) {
  const std::int64_t days = patch_released.day_number() - cve_published.day_number();
  if (days < 0) {
    throw Error(ErrorCode::NegativeInterval, "patch " + patch_released.to_string() +
                                                 " precedes publication " + cve_published.to_string());
  }
  return days;
}

PatchEvent make_patch_event(std::string cve_id, Date cve_published, Date patch_released) {
  const auto days = compute_patch_interval(cve_published, patch_released);
  return PatchEvent{std::move(cve_id), cve_published, patch_released, days};
}

std::vector<double> DatedSeries::values() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.value);
  return out;
}

std::vector<Date> DatedSeries::dates() const {
  std::vector<Date> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.date);
  return out;
}

std::size_t split_train_size(std::size_t n, double ratio) {
  if (n < 3) {
    throw Error(ErrorCode::TooFewPoints, "a train/test split needs at least 3 points, got " + std::to_string(n));
  }
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "split ratio must lie in (0, 1)");
  }
  // Half-up rounding; the epsilon absorbs representation error such as 0.66 * 25.
  const auto rounded = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 0.5 + 1e-9));
  return std::clamp<std::size_t>(rounded, 2, n - 1);
}

double series_median(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "median of an empty list");
  std::vector<double> v(values.begin(), values.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double series_mean(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "mean of an empty list");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

}  // namespace devrisk
