#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "devrisk/core.hpp"
#include "devrisk/forecast.hpp"

namespace devrisk {

/// Vendor patch speed. Fast: median <= 22 days (median time until an exploit
/// exists); Medium: <= 413 days (median time until full disclosure); Slow: beyond.
enum class PatchTrendCategory { Fast, Medium, Slow };
/// CVSS v2 bands: Low 0.0-3.9, Medium 4.0-6.9, High 7.0-10.0.
enum class VulnTrendCategory { Low, Medium, High };
enum class RiskLevel { Low, Medium, High, Critical };

inline constexpr PatchTrendCategory kAllPatchTrends[] = {PatchTrendCategory::Fast, PatchTrendCategory::Medium,
                                                         PatchTrendCategory::Slow};
inline constexpr VulnTrendCategory kAllVulnTrends[] = {VulnTrendCategory::Low, VulnTrendCategory::Medium,
                                                       VulnTrendCategory::High};
inline constexpr RiskLevel kAllRiskLevels[] = {RiskLevel::Low, RiskLevel::Medium, RiskLevel::High,
                                               RiskLevel::Critical};

std::string_view to_string(PatchTrendCategory c);
std::string_view to_string(VulnTrendCategory c);
std::string_view to_string(RiskLevel r);

inline constexpr double kFastMaxDays = 22.0;
inline constexpr double kMediumMaxDays = 413.0;
inline constexpr double kVulnMediumMin = 4.0;
inline constexpr double kVulnHighMin = 7.0;
/// Fewer points than this means no trend can be derived.
inline constexpr std::size_t kMinTrendPoints = 2;

template <typename Category>
struct Classification {
  Category category;
  /// Median the category was derived from; empty when the fallback fired.
  std::optional<double> basis;
  bool fallback = false;
};

/// Fewer than two intervals: Slow (fallback). Otherwise banded on the median.
Classification<PatchTrendCategory> classify_patch_trend(std::span<const double> intervals);

/// Fewer than two severities: Low (fallback). Otherwise the median, rounded to
/// one decimal, is banded. Throws OutOfRange for values outside [0, 10].
Classification<VulnTrendCategory> classify_vulnerability_trend(std::span<const double> severities);

/// Risk matrix (rows VT, columns PT):
///
///            Fast    Medium  Slow
///   Low      Low     Low     Medium
///   Medium   Low     Medium  High
///   High     Medium  High    Critical
RiskLevel combine_fdsri(VulnTrendCategory vt, PatchTrendCategory pt);

struct TrendAssessment {
  std::string device_id;
  PatchTrendCategory pt = PatchTrendCategory::Slow;
  VulnTrendCategory vt = VulnTrendCategory::Low;
  RiskLevel fdsri = RiskLevel::Medium;
  std::optional<double> pt_basis;
  std::optional<double> vt_basis;
  bool insufficient_patch_data = false;
  bool insufficient_vuln_data = false;
  /// Forecasts that entered the classification (empty when absent).
  std::vector<double> pt_forecast;
  std::vector<double> vt_forecast;
  std::optional<ModelTag> pt_model;
  std::optional<ModelTag> vt_model;
};

/// Classifies observed values concatenated with the (already clamped)
/// forecasts and combines the two categories.
TrendAssessment assess_device(const PatchIntervalSeries& patch_series, const SeveritySeries& sev_series,
                              const std::optional<ForecastResult>& pt_forecast,
                              const std::optional<ForecastResult>& vt_forecast);

}  // namespace devrisk
