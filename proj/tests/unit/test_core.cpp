#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "devrisk/core.hpp"
#include "../support/expect.hpp"
#include "../support/oracles.hpp"

using namespace devrisk;
using testing::error_code_of;

TEST_CASE("compute_patch_interval") {
  CHECK(compute_patch_interval(Date::parse("2020-05-01"), Date::parse("2020-05-01")) == 0);
  CHECK(compute_patch_interval(Date::parse("2018-01-01"), Date::parse("2018-06-01")) == 151);
  CHECK(oracle::day_count(2018, 1, 1, 2018, 6, 1) == 151);
  CHECK(error_code_of([] { compute_patch_interval(Date::parse("2018-06-02"), Date::parse("2018-06-01")); }) ==
        ErrorCode::NegativeInterval);

  // 6017 days is about 16.5 years.
  const Date start = Date::parse("2003-01-01");
  const auto interval = compute_patch_interval(start, start.plus_days(6017));
  CHECK(interval == 6017);
  CHECK(interval / 365.25 == doctest::Approx(16.47).epsilon(0.001));
}

TEST_CASE("day counts agree with a calendar walk") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> year(1971, 2060), month(1, 12), day(1, 28);
  for (int i = 0; i < 500; ++i) {
    int y1 = year(rng), m1 = month(rng), d1 = day(rng);
    int y2 = year(rng), m2 = month(rng), d2 = day(rng);
    if (std::tie(y2, m2, d2) < std::tie(y1, m1, d1)) {
      std::swap(y1, y2);
      std::swap(m1, m2);
      std::swap(d1, d2);
    }
    const auto a = Date::from_ymd(y1, static_cast<unsigned>(m1), static_cast<unsigned>(d1));
    const auto b = Date::from_ymd(y2, static_cast<unsigned>(m2), static_cast<unsigned>(d2));
    REQUIRE(compute_patch_interval(a, b) == oracle::day_count(y1, m1, d1, y2, m2, d2));
  }
}

TEST_CASE("patch intervals are additive") {
  const auto a = Date::parse("2016-02-27"), b = Date::parse("2016-03-01"), c = Date::parse("2019-12-31");
  CHECK(compute_patch_interval(a, b) + compute_patch_interval(b, c) == compute_patch_interval(a, c));
  CHECK(compute_patch_interval(a, b) == 3);  // leap year
}

TEST_CASE("date parsing") {
  CHECK(Date::parse("2019-02-28").to_string() == "2019-02-28");
  CHECK(Date::parse("1970-01-01").day_number() == 0);
  CHECK_FALSE(Date::try_parse("2019-02-29"));
  CHECK_FALSE(Date::try_parse("2019-2-28"));
  CHECK_FALSE(Date::try_parse("2019-02-28T00:00"));
  CHECK(Date::parse("2020-12-31").day_of_year() == 366);
  CHECK(error_code_of([] { Date::parse("not a date"); }).has_value());
}

TEST_CASE("identifier validation") {
  CHECK(is_valid_cve_id("CVE-2018-1000"));
  CHECK(is_valid_cve_id("CVE-2021-1234567"));
  CHECK_FALSE(is_valid_cve_id("CVE-2018-100"));
  CHECK_FALSE(is_valid_cve_id("cve-2018-1000"));
  CHECK(is_valid_device_id("cam-1.v2_x"));
  CHECK_FALSE(is_valid_device_id("../etc"));
  CHECK_FALSE(is_valid_device_id(""));
  CHECK(parse_device_category("IP2Serial") == DeviceCategory::IP2Serial);
}

TEST_CASE("make_patch_event") {
  const auto e = make_patch_event("CVE-2018-1000", Date::parse("2018-01-01"), Date::parse("2018-06-01"));
  CHECK(e.interval_days == 151);
  CHECK(e.cve_id == "CVE-2018-1000");
}

TEST_CASE("train_test_split sizes") {
  CHECK(split_train_size(3) == 2);
  CHECK(split_train_size(100) == 66);
  CHECK(split_train_size(10) == 7);
  CHECK(split_train_size(4) == 3);  // round(2.64) = 3
  CHECK(split_train_size(50, 0.5) == 25);
  CHECK(split_train_size(5, 0.1) == 2);   // floor of 2
  CHECK(split_train_size(5, 0.99) == 4);  // at least one test point
  CHECK(error_code_of([] { split_train_size(2); }) == ErrorCode::TooFewPoints);
  CHECK(error_code_of([] { split_train_size(0); }) == ErrorCode::TooFewPoints);

  const std::vector<int> v{1, 2, 3};
  const auto s = train_test_split(v);
  CHECK(s.train == std::vector<int>{1, 2});
  CHECK(s.test == std::vector<int>{3});
}

TEST_CASE("train_test_split round trip") {
  for (std::size_t n = 3; n < 200; ++n) {
    std::vector<double> v(n);
    std::iota(v.begin(), v.end(), 0.5);
    const auto s = train_test_split(v);
    std::vector<double> joined = s.train;
    joined.insert(joined.end(), s.test.begin(), s.test.end());
    REQUIRE(joined == v);
    REQUIRE(s.train.size() >= 2);
    REQUIRE(!s.test.empty());
  }
}

TEST_CASE("series_median") {
  CHECK(series_median(std::vector<double>{5}) == 5);
  CHECK(series_median(std::vector<double>{1, 3}) == 2);
  CHECK(series_median(std::vector<double>{316, 634, 1170}) == 634);
  CHECK(error_code_of([] { series_median(std::vector<double>{}); }) == ErrorCode::EmptyInput);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-100, 100);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(1 + trial % 17);
    for (auto& x : v) x = u(rng);
    const double m = series_median(v);
    REQUIRE(m == oracle::median(v));
    std::shuffle(v.begin(), v.end(), rng);
    REQUIRE(series_median(v) == m);
    REQUIRE(m >= *std::min_element(v.begin(), v.end()));
    REQUIRE(m <= *std::max_element(v.begin(), v.end()));
  }
}
