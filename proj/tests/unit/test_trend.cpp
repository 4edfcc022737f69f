#include <doctest.h>

#include <algorithm>
#include <random>

#include "devrisk/trend.hpp"
#include "../support/expect.hpp"

using namespace devrisk;
using testing::error_code_of;
using PT = PatchTrendCategory;
using VT = VulnTrendCategory;

namespace {

PatchIntervalSeries patches(std::vector<double> values) {
  PatchIntervalSeries s;
  s.device_id = "d";
  Date d = Date::parse("2019-01-01");
  for (double v : values) s.points.push_back({d = d.plus_days(30), v});
  return s;
}

SeveritySeries severities(std::vector<double> values) {
  SeveritySeries s;
  s.device_id = "d";
  Date d = Date::parse("2019-01-01");
  for (double v : values) s.points.push_back({d = d.plus_days(30), v});
  return s;
}

}  // namespace

TEST_CASE("risk matrix") {
  CHECK(combine_fdsri(VT::Low, PT::Fast) == RiskLevel::Low);
  CHECK(combine_fdsri(VT::Low, PT::Medium) == RiskLevel::Low);
  CHECK(combine_fdsri(VT::Low, PT::Slow) == RiskLevel::Medium);
  CHECK(combine_fdsri(VT::Medium, PT::Fast) == RiskLevel::Low);
  CHECK(combine_fdsri(VT::Medium, PT::Medium) == RiskLevel::Medium);
  CHECK(combine_fdsri(VT::Medium, PT::Slow) == RiskLevel::High);
  CHECK(combine_fdsri(VT::High, PT::Fast) == RiskLevel::Medium);
  CHECK(combine_fdsri(VT::High, PT::Medium) == RiskLevel::High);
  CHECK(combine_fdsri(VT::High, PT::Slow) == RiskLevel::Critical);

  for (auto vt : kAllVulnTrends) {
    for (auto pt : kAllPatchTrends) {
      const auto r = combine_fdsri(vt, pt);
      if (pt != PT::Slow) CHECK(combine_fdsri(vt, static_cast<PT>(static_cast<int>(pt) + 1)) >= r);
      if (vt != VT::High) CHECK(combine_fdsri(static_cast<VT>(static_cast<int>(vt) + 1), pt) >= r);
    }
  }
}

TEST_CASE("patch trend thresholds") {
  const auto fallback = classify_patch_trend(std::vector<double>{});
  CHECK(fallback.category == PT::Slow);
  CHECK(fallback.fallback);
  CHECK_FALSE(fallback.basis);
  CHECK(classify_patch_trend(std::vector<double>{3}).category == PT::Slow);
  CHECK(classify_patch_trend(std::vector<double>{3}).fallback);

  CHECK(classify_patch_trend(std::vector<double>{22, 22}).category == PT::Fast);
  CHECK(classify_patch_trend(std::vector<double>{23, 23}).category == PT::Medium);
  CHECK(classify_patch_trend(std::vector<double>{413, 413}).category == PT::Medium);
  CHECK(classify_patch_trend(std::vector<double>{414, 414}).category == PT::Slow);
  const auto q = classify_patch_trend(std::vector<double>{316, 634, 1170});
  CHECK(q.category == PT::Slow);
  CHECK(q.basis == 634.0);
  CHECK_FALSE(q.fallback);

  std::mt19937_64 rng(1);
  std::vector<double> v{5, 800, 40, 17, 390, 22};
  const auto c = classify_patch_trend(v).category;
  for (int i = 0; i < 20; ++i) {
    std::shuffle(v.begin(), v.end(), rng);
    CHECK(classify_patch_trend(v).category == c);
  }
}

TEST_CASE("vulnerability trend thresholds") {
  CHECK(classify_vulnerability_trend(std::vector<double>{9.8}).category == VT::Low);
  CHECK(classify_vulnerability_trend(std::vector<double>{9.8}).fallback);
  CHECK(classify_vulnerability_trend(std::vector<double>{3.9, 3.9}).category == VT::Low);
  CHECK(classify_vulnerability_trend(std::vector<double>{4.0, 4.0}).category == VT::Medium);
  CHECK(classify_vulnerability_trend(std::vector<double>{6.9, 6.9}).category == VT::Medium);
  CHECK(classify_vulnerability_trend(std::vector<double>{7.0, 7.0}).category == VT::High);
  CHECK(classify_vulnerability_trend(std::vector<double>{4.9, 4.9}).category == VT::Medium);
  CHECK(classify_vulnerability_trend(std::vector<double>{10.0, 10.0}).category == VT::High);
  CHECK(classify_vulnerability_trend(std::vector<double>{3.9, 4.0}).category == VT::Medium);  // 3.95 -> 4.0
  CHECK(classify_vulnerability_trend(std::vector<double>{6.9, 6.98}).category == VT::Medium);  // 6.94 -> 6.9
  CHECK(classify_vulnerability_trend(std::vector<double>{6.9, 7.0}).category == VT::High);     // 6.95 -> 7.0
  CHECK(error_code_of([] { classify_vulnerability_trend(std::vector<double>{1, 10.5}); }) == ErrorCode::OutOfRange);
  CHECK(error_code_of([] { classify_vulnerability_trend(std::vector<double>{-1, 5}); }) == ErrorCode::OutOfRange);
}

TEST_CASE("assess_device") {
  const auto none = assess_device(patches({}), severities({7.5}), std::nullopt, std::nullopt);
  CHECK(none.pt == PT::Slow);
  CHECK(none.vt == VT::Low);
  CHECK(none.fdsri == RiskLevel::Medium);
  CHECK(none.insufficient_patch_data);
  CHECK(none.insufficient_vuln_data);

  const auto fast_high = assess_device(patches({3, 5, 9}), severities({8, 9, 7.5}), std::nullopt, std::nullopt);
  CHECK(fast_high.pt == PT::Fast);
  CHECK(fast_high.vt == VT::High);
  CHECK(fast_high.fdsri == RiskLevel::Medium);

  ForecastResult fc{{10, 10, 10, 10, 10}, ModelTag::SMA};
  const auto combined = assess_device(patches({500, 600}), severities({}), fc, std::nullopt);
  CHECK(combined.pt_basis == 10.0);
  CHECK(combined.pt == PT::Fast);
  CHECK(combined.pt_model == ModelTag::SMA);
  CHECK_FALSE(combined.insufficient_patch_data);
  CHECK(combined.fdsri == combine_fdsri(combined.vt, combined.pt));
}
