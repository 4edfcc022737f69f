#include "devrisk/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace devrisk {

std::vector<HistogramBin> histogram(std::span<const double> values, int bins) {
  if (bins < 1) throw Error(ErrorCode::InvalidArgument, "histogram needs at least one bin");
  double hi = 0.0;
  for (double v : values) {
    if (v < 0.0) throw Error(ErrorCode::OutOfRange, "histogram values must be non-negative");
    hi = std::max(hi, v);
  }
  const double width = hi > 0.0 ? hi / bins : 1.0;
  std::vector<HistogramBin> out(static_cast<std::size_t>(bins));
  for (int b = 0; b < bins; ++b) {
    out[static_cast<std::size_t>(b)].lower = b * width;
    out[static_cast<std::size_t>(b)].upper = (b + 1) * width;
  }
  for (double v : values) {
    const int idx = std::min(bins - 1, static_cast<int>(std::floor(v / width)));
    ++out[static_cast<std::size_t>(idx)].count;
  }
  return out;
}

std::string histogram_csv(std::span<const HistogramBin> bins) {
  std::ostringstream out;
  out << "bin,lower,upper,count\n";
  char buf[96];
  for (std::size_t i = 0; i < bins.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,%d\n", i, bins[i].lower, bins[i].upper, bins[i].count);
    out << buf;
  }
  return out.str();
}

double quantile(std::span<const double> values, double q) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "quantile of an empty list");
  if (!(q >= 0.0 && q <= 1.0)) throw Error(ErrorCode::InvalidArgument, "quantile level outside [0, 1]");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::optional<SummaryStats> summarize(std::span<const double> values) {
  if (values.empty()) return std::nullopt;
  SummaryStats s;
  s.count = values.size();
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  s.q1 = quantile(values, 0.25);
  s.median = series_median(values);
  s.q3 = quantile(values, 0.75);
  s.mean = series_mean(values);
  return s;
}

CorpusSummary collect_corpus_summary(const DatasetWorkspace& ws) {
  CorpusSummary s;
  s.devices = ws.devices.size();
  for (const auto& d : ws.devices) {
    auto it = ws.series.find(d.id);
    if (it == ws.series.end()) {
      ++s.devices_without_patches;
      s.vulns_per_device.push_back(0.0);
      continue;
    }
    const auto& patch = it->second.patch;
    const auto& sev = it->second.severity;
    if (patch.empty()) ++s.devices_without_patches;
    for (const auto& p : patch.points) s.patch_intervals.push_back(p.value);
    for (const auto& p : sev.points) s.severities.push_back(p.value);
    s.vulns_per_device.push_back(static_cast<double>(sev.size()));
    if (sev.size() > 1) ++s.devices_with_multiple_vulns;
  }
  return s;
}

namespace {

void print_stats(std::ostringstream& out, const char* label, const std::optional<SummaryStats>& s) {
  char buf[256];
  if (!s) {
    std::snprintf(buf, sizeof buf, "%s: none\n", label);
  } else {
    std::snprintf(buf, sizeof buf, "%s: count=%zu min=%.2f q1=%.2f median=%.2f q3=%.2f max=%.2f mean=%.2f\n", label,
                  s->count, s->min, s->q1, s->median, s->q3, s->max, s->mean);
  }
  out << buf;
}

}  // namespace

std::string format_corpus_summary(const CorpusSummary& summary) {
  std::ostringstream out;
  out << "devices: " << summary.devices << "\n";
  out << "devices without patches: " << summary.devices_without_patches << "\n";
  out << "devices with more than one vulnerability: " << summary.devices_with_multiple_vulns << "\n";
  print_stats(out, "patch interval days", summarize(summary.patch_intervals));
  print_stats(out, "vulnerabilities per device", summarize(summary.vulns_per_device));
  print_stats(out, "cvss v2", summarize(summary.severities));
  return out.str();
}

std::vector<HistogramBin> patch_interval_histogram(const CorpusSummary& summary) {
  return histogram(summary.patch_intervals);
}

std::vector<HistogramBin> vulns_per_device_histogram(const CorpusSummary& summary) {
  std::vector<double> counts;
  for (double c : summary.vulns_per_device) {
    if (c > 1.0) counts.push_back(c);
  }
  return histogram(counts);
}

}  // namespace devrisk
