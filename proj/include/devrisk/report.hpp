#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "devrisk/ingestion.hpp"

namespace devrisk {

struct HistogramBin {
  double lower = 0.0;
  double upper = 0.0;
  int count = 0;
};

inline constexpr int kHistogramBins = 60;

/// Equal-width bins over [0, max(values)]; the last bin is closed on the right.
/// When every value is 0 the bins are one unit wide. Always returns `bins` rows.
std::vector<HistogramBin> histogram(std::span<const double> values, int bins = kHistogramBins);
std::string histogram_csv(std::span<const HistogramBin> bins);

/// Linear-interpolation quantile (q in [0, 1]) of a non-empty list.
double quantile(std::span<const double> values, double q);

struct SummaryStats {
  std::size_t count = 0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

std::optional<SummaryStats> summarize(std::span<const double> values);

struct CorpusSummary {
  std::size_t devices = 0;
  std::size_t devices_without_patches = 0;
  std::size_t devices_with_multiple_vulns = 0;
  std::vector<double> patch_intervals;
  /// Vulnerability count per device, all devices.
  std::vector<double> vulns_per_device;
  std::vector<double> severities;
};

CorpusSummary collect_corpus_summary(const DatasetWorkspace& ws);
std::string format_corpus_summary(const CorpusSummary& summary);

/// Histogram of all patch intervals in days.
std::vector<HistogramBin> patch_interval_histogram(const CorpusSummary& summary);
/// Histogram of vulnerability counts over devices with more than one vulnerability.
std::vector<HistogramBin> vulns_per_device_histogram(const CorpusSummary& summary);

}  // namespace devrisk
