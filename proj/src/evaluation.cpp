#include "devrisk/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace devrisk {

const PredictorOutcome* DeviceEvaluation::outcome(Predictor p) const {
  for (const auto& [pred, out] : outcomes) {
    if (pred == p) return &out;
  }
  return nullptr;
}

namespace {

std::vector<Predictor> sorted_unique(std::span<const Predictor> predictors) {
  std::vector<Predictor> out(predictors.begin(), predictors.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// A predictor that throws on pathological input degrades to the train mean
// rather than aborting the device.
ForecastResult safe_forecast(Predictor predictor, std::span<const SeriesPoint> train,
                             std::span<const Date> horizon_dates, SeriesKind kind, const ForecastConfig& config) {
  try {
    return forecast_series(predictor, train, horizon_dates, kind, config);
  } catch (const Error&) {
    std::vector<double> values;
    for (const auto& p : train) values.push_back(p.value);
    ForecastResult out;
    out.model_tag = model_tag(predictor);
    out.values.assign(horizon_dates.size(), series_mean(values));
    const ForecastBounds b = bounds_for(kind);
    return clamp_forecast(std::move(out), b.floor, b.ceiling);
  }
}

struct TrendRun {
  std::optional<std::string> skip_reason;
  std::vector<double> train_values;
  std::vector<double> test_values;
  std::vector<std::pair<Predictor, ForecastResult>> forecasts;
  std::optional<Predictor> best;

  const ForecastResult& forecast_of(Predictor p) const {
    for (const auto& [pred, fc] : forecasts) {
      if (pred == p) return fc;
    }
    throw Error(ErrorCode::InvalidArgument, "predictor not evaluated");
  }
};

TrendRun run_trend(const DatedSeries& series, SeriesKind kind, const EvaluationConfig& config) {
  TrendRun run;
  if (series.size() < 3) {
    run.skip_reason = "insufficient data: " + std::to_string(series.size()) + " point(s), at least 3 required";
    return run;
  }
  const auto split = train_test_split(series.points, config.split_ratio);
  std::vector<Date> test_dates;
  for (const auto& p : split.train) run.train_values.push_back(p.value);
  for (const auto& p : split.test) {
    run.test_values.push_back(p.value);
    test_dates.push_back(p.date);
  }
  for (Predictor p : config.predictors) {
    run.forecasts.emplace_back(p, safe_forecast(p, split.train, test_dates, kind, config.forecast));
  }
  if (split.train.size() >= 3) {
    run.best = select_best_predictor(split.train, config.predictors, kind, config.forecast);
  } else {
    run.best = sorted_unique(config.predictors).front();
  }
  return run;
}

template <typename Category, typename Classify>
Category predicted_category(const TrendRun& run, const ForecastResult& fc, Classify classify) {
  std::vector<double> combined = run.train_values;
  combined.insert(combined.end(), fc.values.begin(), fc.values.end());
  return classify(combined).category;
}

PredictorOutcome make_outcome(const DeviceEvaluation& ev, const TrendRun& pt_run, const TrendRun& vt_run,
                              const ForecastResult* pt_fc, const ForecastResult* vt_fc) {
  PredictorOutcome out;
  if (pt_fc) {
    out.pt_metrics = error_metrics(pt_fc->values, pt_run.test_values);
    out.predicted_pt = predicted_category<PatchTrendCategory>(
        pt_run, *pt_fc, [](std::span<const double> v) { return classify_patch_trend(v); });
  } else {
    out.predicted_pt = ev.observed_pt;
  }
  if (vt_fc) {
    out.vt_metrics = error_metrics(vt_fc->values, vt_run.test_values);
    out.predicted_vt = predicted_category<VulnTrendCategory>(
        vt_run, *vt_fc, [](std::span<const double> v) { return classify_vulnerability_trend(v); });
  } else {
    out.predicted_vt = ev.observed_vt;
  }
  out.predicted_fdsri = combine_fdsri(out.predicted_vt, out.predicted_pt);
  out.correct_pt = out.predicted_pt == ev.observed_pt;
  out.correct_vt = out.predicted_vt == ev.observed_vt;
  out.correct_fdsri = out.predicted_fdsri == ev.observed_fdsri;
  return out;
}

}  // namespace

DeviceEvaluation evaluate_device(const DeviceModel& device, const PatchIntervalSeries& patch_series,
                                 const SeveritySeries& sev_series, const EvaluationConfig& config) {
  if (config.predictors.empty()) throw Error(ErrorCode::InvalidArgument, "empty predictor set");

  DeviceEvaluation ev;
  ev.device_id = device.id;
  ev.category = device.category;
  ev.observed_pt = classify_patch_trend(patch_series.values()).category;
  ev.observed_vt = classify_vulnerability_trend(sev_series.values()).category;
  ev.observed_fdsri = combine_fdsri(ev.observed_vt, ev.observed_pt);

  const TrendRun pt_run = run_trend(patch_series, SeriesKind::PatchInterval, config);
  const TrendRun vt_run = run_trend(sev_series, SeriesKind::Severity, config);
  ev.pt_skip_reason = pt_run.skip_reason;
  ev.vt_skip_reason = vt_run.skip_reason;

  for (Predictor p : config.predictors) {
    const ForecastResult* pt_fc = pt_run.skip_reason ? nullptr : &pt_run.forecast_of(p);
    const ForecastResult* vt_fc = vt_run.skip_reason ? nullptr : &vt_run.forecast_of(p);
    ev.outcomes.emplace_back(p, make_outcome(ev, pt_run, vt_run, pt_fc, vt_fc));
  }

  ev.best_pt_predictor = pt_run.best;
  ev.best_vt_predictor = vt_run.best;
  const ForecastResult* best_pt = pt_run.best ? &pt_run.forecast_of(*pt_run.best) : nullptr;
  const ForecastResult* best_vt = vt_run.best ? &vt_run.forecast_of(*vt_run.best) : nullptr;
  ev.best = make_outcome(ev, pt_run, vt_run, best_pt, best_vt);
  return ev;
}

Predictor select_best_predictor(std::span<const SeriesPoint> train, std::span<const Predictor> predictors,
                                SeriesKind kind, const ForecastConfig& config) {
  if (train.size() < 3) {
    throw Error(ErrorCode::InsufficientData, "predictor selection needs at least 3 points, got " +
                                                 std::to_string(train.size()));
  }
  if (predictors.empty()) throw Error(ErrorCode::InvalidArgument, "empty predictor set");
  const auto inner = train_test_split(train, kDefaultSplitRatio);
  std::vector<Date> dates;
  std::vector<double> observed;
  for (const auto& p : inner.test) {
    dates.push_back(p.date);
    observed.push_back(p.value);
  }

  const auto ordered = sorted_unique(predictors);
  Predictor best = ordered.front();
  std::optional<double> best_score;
  for (Predictor p : ordered) {
    const auto fc = safe_forecast(p, inner.train, dates, kind, config);
    const double score = mad(fc.values, observed);
    // Ties (up to rounding noise) keep the earlier, simpler predictor.
    if (!best_score || score < *best_score - 1e-12 * (1.0 + std::abs(*best_score))) {
      best_score = score;
      best = p;
    }
  }
  return best;
}

double AccuracyCounts::accuracy_pct() const {
  return devices == 0 ? 0.0 : 100.0 * correct / devices;
}

double AccuracyCounts::accuracy_evaluable_pct() const {
  return evaluable == 0 ? 0.0 : 100.0 * correct_evaluable / evaluable;
}

const PredictorReport* CorpusReport::find(std::string_view label) const {
  if (best.label == label) return &best;
  for (const auto& p : predictors) {
    if (p.label == label) return &p;
  }
  return nullptr;
}

namespace {

int pt_level(PatchTrendCategory c) {
  // Slow < Medium < Fast
  return 2 - static_cast<int>(c);
}

void tally(AccuracyCounts& counts, bool evaluable, bool correct, int predicted_level, int observed_level) {
  ++counts.devices;
  if (correct) ++counts.correct;
  if (evaluable) {
    ++counts.evaluable;
    if (correct) ++counts.correct_evaluable;
  }
  if (predicted_level > observed_level) ++counts.too_high;
  if (predicted_level < observed_level) ++counts.too_low;
}

ErrorSummary summarize_errors(const std::vector<ErrorMetrics>& metrics) {
  ErrorSummary s;
  s.devices = static_cast<int>(metrics.size());
  if (metrics.empty()) return s;
  std::vector<double> r, m;
  for (const auto& e : metrics) {
    r.push_back(e.rmse);
    m.push_back(e.mad);
  }
  s.median_rmse = series_median(r);
  s.median_mad = series_median(m);
  return s;
}

template <typename Accessor>
PredictorReport build_report(std::string label, std::span<const DeviceEvaluation> evals, Accessor outcome_of) {
  PredictorReport rep;
  rep.label = std::move(label);
  std::vector<ErrorMetrics> pt_metrics, vt_metrics;
  for (const auto& ev : evals) {
    const PredictorOutcome& o = outcome_of(ev);
    if (o.pt_metrics) pt_metrics.push_back(*o.pt_metrics);
    if (o.vt_metrics) vt_metrics.push_back(*o.vt_metrics);

    const bool pt_eval = !ev.pt_skip_reason;
    const bool vt_eval = !ev.vt_skip_reason;
    tally(rep.pt, pt_eval, o.correct_pt, pt_level(o.predicted_pt), pt_level(ev.observed_pt));
    tally(rep.vt, vt_eval, o.correct_vt, static_cast<int>(o.predicted_vt), static_cast<int>(ev.observed_vt));
    tally(rep.fdsri, pt_eval || vt_eval, o.correct_fdsri, static_cast<int>(o.predicted_fdsri),
          static_cast<int>(ev.observed_fdsri));

    auto& cat = rep.per_category[ev.category];
    ++cat.devices;
    cat.correct_pt += o.correct_pt ? 1 : 0;
    cat.correct_vt += o.correct_vt ? 1 : 0;
    cat.correct_fdsri += o.correct_fdsri ? 1 : 0;

    ++rep.pt_confusion[static_cast<std::size_t>(ev.observed_pt)][static_cast<std::size_t>(o.predicted_pt)];
    ++rep.vt_confusion[static_cast<std::size_t>(ev.observed_vt)][static_cast<std::size_t>(o.predicted_vt)];
    ++rep.fdsri_confusion[static_cast<std::size_t>(ev.observed_fdsri)][static_cast<std::size_t>(o.predicted_fdsri)];
  }
  rep.pt_errors = summarize_errors(pt_metrics);
  rep.vt_errors = summarize_errors(vt_metrics);
  return rep;
}

}  // namespace

CorpusReport aggregate_corpus(std::span<const DeviceEvaluation> evaluations, std::span<const Predictor> predictors) {
  if (evaluations.empty()) throw Error(ErrorCode::EmptyCorpus, "no device evaluations to aggregate");
  CorpusReport report;
  report.devices = static_cast<int>(evaluations.size());
  for (const auto& ev : evaluations) {
    ++report.devices_per_category[ev.category];
    ++report.observed_pt[static_cast<std::size_t>(ev.observed_pt)];
    ++report.observed_vt[static_cast<std::size_t>(ev.observed_vt)];
    ++report.observed_fdsri[static_cast<std::size_t>(ev.observed_fdsri)];
    report.pt_skipped += ev.pt_skip_reason ? 1 : 0;
    report.vt_skipped += ev.vt_skip_reason ? 1 : 0;
  }
  for (Predictor p : predictors) {
    report.predictors.push_back(build_report(std::string(to_string(p)), evaluations,
                                             [p](const DeviceEvaluation& ev) -> const PredictorOutcome& {
                                               const PredictorOutcome* o = ev.outcome(p);
                                               if (!o) {
                                                 throw Error(ErrorCode::InvalidArgument,
                                                             "device " + ev.device_id + " lacks predictor " +
                                                                 std::string(to_string(p)));
                                               }
                                               return *o;
                                             }));
  }
  report.best = build_report("BEST", evaluations,
                             [](const DeviceEvaluation& ev) -> const PredictorOutcome& { return ev.best; });
  return report;
}

std::vector<DeviceEvaluation> evaluate_workspace(const DatasetWorkspace& ws, const EvaluationConfig& config) {
  std::vector<const DeviceModel*> devices;
  for (const auto& d : ws.devices) devices.push_back(&d);
  std::sort(devices.begin(), devices.end(), [](const DeviceModel* a, const DeviceModel* b) { return a->id < b->id; });

  std::vector<DeviceEvaluation> results(devices.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  const auto worker = [&] {
    for (std::size_t i = next++; i < devices.size() && !failed; i = next++) {
      try {
        const DeviceModel& d = *devices[i];
        auto it = ws.series.find(d.id);
        const DeviceSeries empty{{{d.id, {}}}, {{d.id, {}}}};
        const DeviceSeries& s = it == ws.series.end() ? empty : it->second;
        results[i] = evaluate_device(d, s.patch, s.severity, config);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };

  const int jobs = std::max(1, std::min<int>(config.jobs, static_cast<int>(std::max<std::size_t>(devices.size(), 1))));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

int production_horizon(std::size_t n) {
  return std::max(1, static_cast<int>(std::floor(0.34 * static_cast<double>(n) + 0.5 + 1e-9)));
}

TrendAssessment predict_future(const PatchIntervalSeries& patch_series, const SeveritySeries& sev_series,
                               std::span<const Predictor> predictors, const ForecastConfig& config) {
  if (predictors.empty()) throw Error(ErrorCode::InvalidArgument, "empty predictor set");
  const auto forecast_trend = [&](const DatedSeries& series, SeriesKind kind) -> std::optional<ForecastResult> {
    if (series.size() < 3) return std::nullopt;
    const Predictor best = select_best_predictor(series.points, predictors, kind, config);
    const auto dates = future_dates(series.points, production_horizon(series.size()));
    return safe_forecast(best, series.points, dates, kind, config);
  };
  return assess_device(patch_series, sev_series, forecast_trend(patch_series, SeriesKind::PatchInterval),
                       forecast_trend(sev_series, SeriesKind::Severity));
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

using ojson = nlohmann::ordered_json;

ojson optional_number(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

ojson counts_json(const AccuracyCounts& c) {
  ojson j;
  j["devices"] = c.devices;
  j["correct"] = c.correct;
  j["accuracy_pct"] = c.accuracy_pct();
  j["evaluable"] = c.evaluable;
  j["correct_evaluable"] = c.correct_evaluable;
  j["accuracy_evaluable_pct"] = c.accuracy_evaluable_pct();
  j["too_high"] = c.too_high;
  j["too_low"] = c.too_low;
  return j;
}

ojson errors_json(const ErrorSummary& e) {
  ojson j;
  j["devices"] = e.devices;
  j["median_rmse"] = optional_number(e.median_rmse);
  j["median_mad"] = optional_number(e.median_mad);
  return j;
}

template <std::size_t N>
ojson matrix_json(const std::array<std::array<int, N>, N>& m) {
  ojson rows = ojson::array();
  for (const auto& row : m) rows.push_back(ojson(row));
  return rows;
}

ojson predictor_json(const PredictorReport& r) {
  ojson j;
  j["label"] = r.label;
  j["pt_errors"] = errors_json(r.pt_errors);
  j["vt_errors"] = errors_json(r.vt_errors);
  j["pt_accuracy"] = counts_json(r.pt);
  j["vt_accuracy"] = counts_json(r.vt);
  j["fdsri_accuracy"] = counts_json(r.fdsri);
  ojson cats = ojson::object();
  for (const auto& [cat, acc] : r.per_category) {
    ojson c;
    c["devices"] = acc.devices;
    c["correct_pt"] = acc.correct_pt;
    c["correct_vt"] = acc.correct_vt;
    c["correct_fdsri"] = acc.correct_fdsri;
    cats[std::string(to_string(cat))] = c;
  }
  j["per_category"] = cats;
  j["pt_confusion"] = matrix_json(r.pt_confusion);
  j["vt_confusion"] = matrix_json(r.vt_confusion);
  j["fdsri_confusion"] = matrix_json(r.fdsri_confusion);
  return j;
}

ojson metrics_json(const std::optional<ErrorMetrics>& m) {
  if (!m) return nullptr;
  ojson j;
  j["rmse"] = m->rmse;
  j["mad"] = m->mad;
  return j;
}

ojson outcome_json(const PredictorOutcome& o) {
  ojson j;
  j["pt_metrics"] = metrics_json(o.pt_metrics);
  j["vt_metrics"] = metrics_json(o.vt_metrics);
  j["predicted_pt"] = std::string(to_string(o.predicted_pt));
  j["predicted_vt"] = std::string(to_string(o.predicted_vt));
  j["predicted_fdsri"] = std::string(to_string(o.predicted_fdsri));
  j["correct_pt"] = o.correct_pt;
  j["correct_vt"] = o.correct_vt;
  j["correct_fdsri"] = o.correct_fdsri;
  return j;
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string num(const std::optional<double>& v) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

}  // namespace

std::string report_to_json(const CorpusReport& report, std::span<const DeviceEvaluation> evaluations) {
  ojson j;
  j["devices"] = report.devices;
  ojson per_cat = ojson::object();
  for (const auto& [cat, n] : report.devices_per_category) per_cat[std::string(to_string(cat))] = n;
  j["devices_per_category"] = per_cat;
  ojson observed;
  for (PatchTrendCategory c : kAllPatchTrends) observed["pt"][std::string(to_string(c))] = report.observed_pt[static_cast<std::size_t>(c)];
  for (VulnTrendCategory c : kAllVulnTrends) observed["vt"][std::string(to_string(c))] = report.observed_vt[static_cast<std::size_t>(c)];
  for (RiskLevel c : kAllRiskLevels) observed["fdsri"][std::string(to_string(c))] = report.observed_fdsri[static_cast<std::size_t>(c)];
  j["observed"] = observed;
  j["pt_skipped"] = report.pt_skipped;
  j["vt_skipped"] = report.vt_skipped;
  ojson preds = ojson::array();
  for (const auto& p : report.predictors) preds.push_back(predictor_json(p));
  j["predictors"] = preds;
  j["best_per_device"] = predictor_json(report.best);

  ojson devices = ojson::array();
  for (const auto& ev : evaluations) {
    ojson d;
    d["device_id"] = ev.device_id;
    d["category"] = std::string(to_string(ev.category));
    d["pt_skip_reason"] = ev.pt_skip_reason ? ojson(*ev.pt_skip_reason) : ojson(nullptr);
    d["vt_skip_reason"] = ev.vt_skip_reason ? ojson(*ev.vt_skip_reason) : ojson(nullptr);
    d["observed_pt"] = std::string(to_string(ev.observed_pt));
    d["observed_vt"] = std::string(to_string(ev.observed_vt));
    d["observed_fdsri"] = std::string(to_string(ev.observed_fdsri));
    ojson outs = ojson::object();
    for (const auto& [p, o] : ev.outcomes) outs[std::string(to_string(p))] = outcome_json(o);
    d["predictors"] = outs;
    ojson best = outcome_json(ev.best);
    best["pt_predictor"] = ev.best_pt_predictor ? ojson(std::string(to_string(*ev.best_pt_predictor))) : ojson(nullptr);
    best["vt_predictor"] = ev.best_vt_predictor ? ojson(std::string(to_string(*ev.best_vt_predictor))) : ojson(nullptr);
    d["best"] = best;
    devices.push_back(d);
  }
  j["device_evaluations"] = devices;
  return j.dump(2) + "\n";
}

std::string report_to_csv(const CorpusReport& report) {
  std::ostringstream out;
  std::vector<const PredictorReport*> rows;
  for (const auto& p : report.predictors) rows.push_back(&p);

  out << "# prediction_error\n";
  out << "predictor,pt_devices,pt_median_rmse,pt_median_mad,vt_devices,vt_median_rmse,vt_median_mad\n";
  for (const auto* r : rows) {
    out << r->label << ',' << r->pt_errors.devices << ',' << num(r->pt_errors.median_rmse) << ','
        << num(r->pt_errors.median_mad) << ',' << r->vt_errors.devices << ',' << num(r->vt_errors.median_rmse)
        << ',' << num(r->vt_errors.median_mad) << '\n';
  }

  rows.push_back(&report.best);
  out << "\n# accuracy\n";
  out << "predictor,pt_correct,pt_accuracy_pct,vt_correct,vt_accuracy_pct,fdsri_correct,fdsri_accuracy_pct,"
         "fdsri_too_high,fdsri_too_low,devices\n";
  for (const auto* r : rows) {
    out << r->label << ',' << r->pt.correct << ',' << pct(r->pt.accuracy_pct()) << ',' << r->vt.correct << ','
        << pct(r->vt.accuracy_pct()) << ',' << r->fdsri.correct << ',' << pct(r->fdsri.accuracy_pct()) << ','
        << r->fdsri.too_high << ',' << r->fdsri.too_low << ',' << r->fdsri.devices << '\n';
  }

  const auto per_category_table = [&](const char* title, auto correct_of) {
    out << "\n# " << title << "\n";
    out << "category,devices";
    for (const auto* r : rows) out << ',' << r->label;
    out << '\n';
    for (const auto& [cat, n] : report.devices_per_category) {
      out << to_string(cat) << ',' << n;
      for (const auto* r : rows) {
        auto it = r->per_category.find(cat);
        const int correct = it == r->per_category.end() ? 0 : correct_of(it->second);
        out << ',' << pct(n == 0 ? 0.0 : 100.0 * correct / n);
      }
      out << '\n';
    }
  };
  per_category_table("pt_accuracy_by_category", [](const CategoryAccuracy& c) { return c.correct_pt; });
  per_category_table("vt_accuracy_by_category", [](const CategoryAccuracy& c) { return c.correct_vt; });
  per_category_table("fdsri_accuracy_by_category", [](const CategoryAccuracy& c) { return c.correct_fdsri; });
  return out.str();
}

}  // namespace devrisk
