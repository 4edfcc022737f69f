#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "devrisk/ingestion.hpp"
#include "devrisk/predictor.hpp"
#include "devrisk/trend.hpp"

namespace devrisk {

struct EvaluationConfig {
  double split_ratio = kDefaultSplitRatio;
  std::vector<Predictor> predictors{std::begin(kAllPredictors), std::end(kAllPredictors)};
  ForecastConfig forecast;
  /// Worker threads for corpus evaluation; results do not depend on it.
  int jobs = 1;
};

/// Result of one predictor on one device. Metrics are absent exactly when the
/// corresponding trend was skipped for lack of data.
struct PredictorOutcome {
  std::optional<ErrorMetrics> pt_metrics;
  std::optional<ErrorMetrics> vt_metrics;
  PatchTrendCategory predicted_pt = PatchTrendCategory::Slow;
  VulnTrendCategory predicted_vt = VulnTrendCategory::Low;
  RiskLevel predicted_fdsri = RiskLevel::Medium;
  bool correct_pt = false;
  bool correct_vt = false;
  bool correct_fdsri = false;
};

struct DeviceEvaluation {
  std::string device_id;
  DeviceCategory category = DeviceCategory::Other;
  std::optional<std::string> pt_skip_reason;
  std::optional<std::string> vt_skip_reason;
  PatchTrendCategory observed_pt = PatchTrendCategory::Slow;
  VulnTrendCategory observed_vt = VulnTrendCategory::Low;
  RiskLevel observed_fdsri = RiskLevel::Medium;
  /// One entry per predictor of the configured set, in that order.
  std::vector<std::pair<Predictor, PredictorOutcome>> outcomes;
  /// Per trend, the predictor chosen by select_best_predictor on the train part.
  PredictorOutcome best;
  std::optional<Predictor> best_pt_predictor;
  std::optional<Predictor> best_vt_predictor;

  const PredictorOutcome* outcome(Predictor p) const;
};

/// For each trend with at least 3 points: split, fit every predictor on the
/// train part, forecast |test| steps, clamp, score against the test part and
/// categorize train ++ forecast. The observed categories come from the full
/// series. Shorter trends get a skip reason and predicted = observed.
DeviceEvaluation evaluate_device(const DeviceModel& device, const PatchIntervalSeries& patch_series,
                                 const SeveritySeries& sev_series, const EvaluationConfig& config = {});

/// Fits each predictor on the first 66% of `train` and scores its forecast of
/// the rest by MAD. Lowest MAD wins; ties go to the earlier of AR, SMA, ARIMA,
/// TREND. Throws InsufficientData for |train| < 3.
Predictor select_best_predictor(std::span<const SeriesPoint> train, std::span<const Predictor> predictors,
                                SeriesKind kind, const ForecastConfig& config = {});

/// Counts for one trend under one predictor. "Too high" means the predicted
/// level sits above the observed one: for VT and FDSRI a more severe class,
/// for PT a faster class (Slow < Medium < Fast).
struct AccuracyCounts {
  int devices = 0;
  int evaluable = 0;
  int correct = 0;
  int correct_evaluable = 0;
  int too_high = 0;
  int too_low = 0;

  double accuracy_pct() const;
  double accuracy_evaluable_pct() const;

  friend bool operator==(const AccuracyCounts&, const AccuracyCounts&) = default;
};

struct ErrorSummary {
  int devices = 0;
  std::optional<double> median_rmse;
  std::optional<double> median_mad;

  friend bool operator==(const ErrorSummary&, const ErrorSummary&) = default;
};

struct CategoryAccuracy {
  int devices = 0;
  int correct_pt = 0;
  int correct_vt = 0;
  int correct_fdsri = 0;

  friend bool operator==(const CategoryAccuracy&, const CategoryAccuracy&) = default;
};

struct PredictorReport {
  std::string label;
  ErrorSummary pt_errors;
  ErrorSummary vt_errors;
  AccuracyCounts pt;
  AccuracyCounts vt;
  AccuracyCounts fdsri;
  std::map<DeviceCategory, CategoryAccuracy> per_category;
  /// [observed][predicted]
  std::array<std::array<int, 3>, 3> pt_confusion{};
  std::array<std::array<int, 3>, 3> vt_confusion{};
  std::array<std::array<int, 4>, 4> fdsri_confusion{};

  friend bool operator==(const PredictorReport&, const PredictorReport&) = default;
};

struct CorpusReport {
  int devices = 0;
  std::map<DeviceCategory, int> devices_per_category;
  std::array<int, 3> observed_pt{};
  std::array<int, 3> observed_vt{};
  std::array<int, 4> observed_fdsri{};
  int pt_skipped = 0;
  int vt_skipped = 0;
  std::vector<PredictorReport> predictors;
  /// Best-per-device path (selection on each device's own train split).
  PredictorReport best;

  const PredictorReport* find(std::string_view label) const;

  friend bool operator==(const CorpusReport&, const CorpusReport&) = default;
};

/// Throws EmptyCorpus on an empty list.
CorpusReport aggregate_corpus(std::span<const DeviceEvaluation> evaluations, std::span<const Predictor> predictors);

/// Evaluates every device of the workspace (optionally in parallel) and
/// returns the results ordered by device id.
std::vector<DeviceEvaluation> evaluate_workspace(const DatasetWorkspace& ws, const EvaluationConfig& config = {});

/// max(1, round-half-up(0.34 * n))
int production_horizon(std::size_t n);

/// Production path without a test split: per trend with >= 3 points the best
/// predictor is selected, refitted on all data and forecast production_horizon(n)
/// steps ahead; the assessment then combines observations and forecasts.
TrendAssessment predict_future(const PatchIntervalSeries& patch_series, const SeveritySeries& sev_series,
                               std::span<const Predictor> predictors, const ForecastConfig& config = {});

std::string report_to_json(const CorpusReport& report, std::span<const DeviceEvaluation> evaluations);
std::string report_to_csv(const CorpusReport& report);

}  // namespace devrisk
