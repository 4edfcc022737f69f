#include "devrisk/trend.hpp"

#include <cmath>

namespace devrisk {

std::string_view to_string(PatchTrendCategory c) {
  switch (c) {
    case PatchTrendCategory::Fast: return "Fast";
    case PatchTrendCategory::Medium: return "Medium";
    case PatchTrendCategory::Slow: return "Slow";
  }
  return "Slow";
}

std::string_view to_string(VulnTrendCategory c) {
  switch (c) {
    case VulnTrendCategory::Low: return "Low";
    case VulnTrendCategory::Medium: return "Medium";
    case VulnTrendCategory::High: return "High";
  }
  return "Low";
}

std::string_view to_string(RiskLevel r) {
  switch (r) {
    case RiskLevel::Low: return "Low";
    case RiskLevel::Medium: return "Medium";
    case RiskLevel::High: return "High";
    case RiskLevel::Critical: return "Critical";
  }
  return "Low";
}

Classification<PatchTrendCategory> classify_patch_trend(std::span<const double> intervals) {
  if (intervals.size() < kMinTrendPoints) return {PatchTrendCategory::Slow, std::nullopt, true};
  const double median = series_median(intervals);
  PatchTrendCategory c = PatchTrendCategory::Slow;
  if (median <= kFastMaxDays) {
    c = PatchTrendCategory::Fast;
  } else if (median <= kMediumMaxDays) {
    c = PatchTrendCategory::Medium;
  }
  return {c, median, false};
}

Classification<VulnTrendCategory> classify_vulnerability_trend(std::span<const double> severities) {
  for (double v : severities) {
    if (!(v >= 0.0 && v <= 10.0)) {
      throw Error(ErrorCode::OutOfRange, "CVSS value " + std::to_string(v) + " outside [0, 10]");
    }
  }
  if (severities.size() < kMinTrendPoints) return {VulnTrendCategory::Low, std::nullopt, true};
  const double median = series_median(severities);
  // CVSS is published with one decimal, so the bands are applied at that granularity.
  const double rounded = std::floor(median * 10.0 + 0.5) / 10.0;
  VulnTrendCategory c = VulnTrendCategory::Low;
  if (rounded >= kVulnHighMin) {
    c = VulnTrendCategory::High;
  } else if (rounded >= kVulnMediumMin) {
    c = VulnTrendCategory::Medium;
  }
  return {c, median, false};
}

RiskLevel combine_fdsri(VulnTrendCategory vt, PatchTrendCategory pt) {
  static constexpr RiskLevel kMatrix[3][3] = {
      {RiskLevel::Low, RiskLevel::Low, RiskLevel::Medium},
      {RiskLevel::Low, RiskLevel::Medium, RiskLevel::High},
      {RiskLevel::Medium, RiskLevel::High, RiskLevel::Critical},
  };
  return kMatrix[static_cast<int>(vt)][static_cast<int>(pt)];
}

TrendAssessment assess_device(const PatchIntervalSeries& patch_series, const SeveritySeries& sev_series,
                              const std::optional<ForecastResult>& pt_forecast,
                              const std::optional<ForecastResult>& vt_forecast) {
  TrendAssessment a;
  a.device_id = !patch_series.device_id.empty() ? patch_series.device_id : sev_series.device_id;

  std::vector<double> intervals = patch_series.values();
  if (pt_forecast) {
    a.pt_forecast = pt_forecast->values;
    a.pt_model = pt_forecast->model_tag;
    intervals.insert(intervals.end(), pt_forecast->values.begin(), pt_forecast->values.end());
  }
  std::vector<double> severities = sev_series.values();
  if (vt_forecast) {
    a.vt_forecast = vt_forecast->values;
    a.vt_model = vt_forecast->model_tag;
    severities.insert(severities.end(), vt_forecast->values.begin(), vt_forecast->values.end());
  }

  const auto pt = classify_patch_trend(intervals);
  const auto vt = classify_vulnerability_trend(severities);
  a.pt = pt.category;
  a.pt_basis = pt.basis;
  a.insufficient_patch_data = pt.fallback;
  a.vt = vt.category;
  a.vt_basis = vt.basis;
  a.insufficient_vuln_data = vt.fallback;
  a.fdsri = combine_fdsri(a.vt, a.pt);
  return a;
}

}  // namespace devrisk
