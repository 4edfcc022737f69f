#include "devrisk/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>

#include <CLI11.hpp>

#include "devrisk/report.hpp"

namespace devrisk::cli {

namespace {

void write_output(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  f << content;
  if (!f) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

std::filesystem::path output_dir(const CliConfig& config) {
  const auto dir = config.out.empty() ? config.workspace : config.out;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  return dir;
}

// Library errors are input problems; anything else is a bug.
template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

DatasetWorkspace load_nonempty(const CliConfig& config, std::ostream& err, bool& empty) {
  auto ws = load_workspace(config.workspace);
  empty = ws.devices.empty();
  if (empty) err << "error: workspace " << config.workspace.string() << " contains no devices\n";
  return ws;
}

std::string fixed(double v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

int cmd_ingest(const IngestArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto devices = load_devices_file(args.devices);
    const auto feed = load_cve_feed(args.feed);

    DatasetWorkspace ws;
    ws.provenance[args.devices.filename().string()] = sha256_hex(read_text_file(args.devices));
    ws.provenance[args.feed.filename().string()] = sha256_hex(read_text_file(args.feed));

    std::map<std::string, std::vector<ReleaseNote>> notes_by_device;
    for (const auto& path : args.notes) {
      const std::string id = path.stem().string();
      const bool known = std::any_of(devices.begin(), devices.end(), [&](const DeviceModel& d) { return d.id == id; });
      if (!known) throw Error(ErrorCode::InvalidArgument, "release notes " + path.string() + " name unknown device '" + id + "'");
      const std::string text = read_text_file(path);
      ws.provenance[path.filename().string()] = sha256_hex(text);
      auto parsed = parse_release_notes(text, args.parser_id);
      auto& bucket = notes_by_device[id];
      bucket.insert(bucket.end(), parsed.begin(), parsed.end());
    }

    std::size_t warnings = 0;
    for (const auto& device : devices) {
      const auto& notes = notes_by_device[device.id];
      auto dataset = build_device_dataset(device, notes, feed);
      for (const auto& w : dataset.warnings) {
        err << "warning: " << device.id << ": " << to_string(w.code) << ": " << w.message << "\n";
      }
      warnings += dataset.warnings.size();
      out << device.id << ": cves=" << dataset.severity.size() << " patches=" << dataset.patch.size() << "\n";
      ws.add_device(device, std::move(dataset.patch), std::move(dataset.severity));
    }
    save_workspace(ws, args.workspace);
    out << "ingested " << devices.size() << " device(s) into " << args.workspace.string() << "; " << warnings
        << " warning(s)\n";
    return kExitOk;
  });
}

int cmd_evaluate(const CliConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    bool empty = false;
    const auto ws = load_nonempty(config, err, empty);
    if (empty) return kExitInput;

    const auto evaluations = evaluate_workspace(ws, config.evaluation);
    const auto report = aggregate_corpus(evaluations, config.evaluation.predictors);
    const auto dir = output_dir(config);
    write_output(dir / "report.json", report_to_json(report, evaluations));
    write_output(dir / "report.csv", report_to_csv(report));

    out << "predictor  PT acc%  VT acc%  FDSRI acc%  PT RMSE    PT MAD     VT RMSE  VT MAD\n";
    std::vector<const PredictorReport*> rows;
    for (const auto& p : report.predictors) rows.push_back(&p);
    rows.push_back(&report.best);
    for (const auto* r : rows) {
      char line[256];
      const auto opt = [](const std::optional<double>& v) { return v ? fixed(*v, 2) : std::string("-"); };
      std::snprintf(line, sizeof line, "%-9s  %7s  %7s  %10s  %-9s  %-9s  %-7s  %-7s\n", r->label.c_str(),
                    fixed(r->pt.accuracy_pct(), 2).c_str(), fixed(r->vt.accuracy_pct(), 2).c_str(),
                    fixed(r->fdsri.accuracy_pct(), 2).c_str(), opt(r->pt_errors.median_rmse).c_str(),
                    opt(r->pt_errors.median_mad).c_str(), opt(r->vt_errors.median_rmse).c_str(),
                    opt(r->vt_errors.median_mad).c_str());
      out << line;
    }
    out << "devices: " << report.devices << "; report written to " << dir.string() << "\n";
    return kExitOk;
  });
}

int cmd_predict(const CliConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    bool empty = false;
    const auto ws = load_nonempty(config, err, empty);
    if (empty) return kExitInput;

    std::vector<const DeviceModel*> devices;
    for (const auto& d : ws.devices) devices.push_back(&d);
    std::sort(devices.begin(), devices.end(), [](auto* a, auto* b) { return a->id < b->id; });
    for (const auto* d : devices) {
      const auto& s = ws.series.at(d->id);
      const auto a = predict_future(s.patch, s.severity, config.evaluation.predictors, config.evaluation.forecast);
      out << d->id << ", " << to_string(a.pt) << ", " << to_string(a.vt) << ", " << to_string(a.fdsri) << "\n";
    }
    return kExitOk;
  });
}

int cmd_report(const CliConfig& config, bool histograms, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto ws = load_workspace(config.workspace);
    const auto summary = collect_corpus_summary(ws);
    out << format_corpus_summary(summary);
    if (histograms) {
      const auto dir = output_dir(config);
      write_output(dir / "hist_patch_intervals.csv", histogram_csv(patch_interval_histogram(summary)));
      write_output(dir / "hist_vulns_per_device.csv", histogram_csv(vulns_per_device_histogram(summary)));
      out << "histograms written to " << dir.string() << "\n";
    }
    return kExitOk;
  });
}

namespace {

struct EvalOptions {
  std::string workspace;
  std::string out;
  double ratio = kDefaultSplitRatio;
  std::vector<std::string> predictors{"all"};
  int max_p = 12;
  int max_q = 12;
  int max_d = 2;
  bool exhaustive = false;
  int jobs = 1;
  std::vector<double> tau;
};

void add_eval_options(CLI::App* sub, EvalOptions& o, bool full) {
  sub->add_option("--workspace", o.workspace, "Workspace directory")->required();
  sub->add_option("--out", o.out, "Output directory (defaults to the workspace)");
  if (!full) return;
  sub->add_option("--ratio", o.ratio, "Training fraction of each series");
  sub->add_option("--predictors", o.predictors, "Predictors: ar, arima, sma, trend or all")->delimiter(',');
  sub->add_option("--max-p", o.max_p, "Largest ARIMA AR order");
  sub->add_option("--max-q", o.max_q, "Largest ARIMA MA order");
  sub->add_option("--max-d", o.max_d, "Largest ARIMA differencing order");
  sub->add_flag("--exhaustive", o.exhaustive, "Search the full ARIMA (p, q) grid instead of stepwise");
  sub->add_option("--jobs", o.jobs, "Worker threads");
  sub->add_option("--tau", o.tau, "Changepoint prior scale grid")->delimiter(',');
}

CliConfig to_config(const EvalOptions& o) {
  if (!(o.ratio > 0.0 && o.ratio < 1.0)) throw Error(ErrorCode::InvalidArgument, "--ratio must lie in (0, 1)");
  if (o.max_p < 0 || o.max_q < 0 || o.max_d < 0 || o.max_d > 12 || o.max_p > 12 || o.max_q > 12) {
    throw Error(ErrorCode::InvalidArgument, "ARIMA grid bounds must lie in 0..12");
  }
  if (o.jobs < 1) throw Error(ErrorCode::InvalidArgument, "--jobs must be >= 1");

  CliConfig c;
  c.workspace = o.workspace;
  c.out = o.out;
  c.evaluation.split_ratio = o.ratio;
  c.evaluation.jobs = o.jobs;
  c.evaluation.forecast.arima.max_p = o.max_p;
  c.evaluation.forecast.arima.max_q = o.max_q;
  c.evaluation.forecast.arima.d_max = o.max_d;
  c.evaluation.forecast.arima.stepwise = !o.exhaustive;
  if (!o.tau.empty()) {
    for (double t : o.tau) {
      if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "--tau values must be positive");
    }
    c.evaluation.forecast.trend.tau_grid = o.tau;
  }

  std::set<Predictor> chosen;
  for (const auto& name : o.predictors) {
    if (name == "all") {
      chosen.insert(std::begin(kAllPredictors), std::end(kAllPredictors));
    } else {
      chosen.insert(parse_predictor(name));
    }
  }
  if (chosen.empty()) throw Error(ErrorCode::InvalidArgument, "no predictors selected");
  c.evaluation.predictors.assign(chosen.begin(), chosen.end());
  return c;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Device security risk forecasting: patch and vulnerability trends, FDSRI scoring"};
  app.require_subcommand(1);

  IngestArgs ingest;
  std::vector<std::string> notes;
  std::string feed, devices, ingest_ws;
  auto* ingest_cmd = app.add_subcommand("ingest", "Build a workspace from release notes and a CVE feed");
  ingest_cmd->add_option("--notes", notes, "Release-note file per device (file stem = device id)");
  ingest_cmd->add_option("--feed", feed, "Normalized CVE feed (JSON)")->required();
  ingest_cmd->add_option("--devices", devices, "Device list (JSON)")->required();
  ingest_cmd->add_option("--workspace", ingest_ws, "Workspace directory to write")->required();
  ingest_cmd->add_option("--parser", ingest.parser_id, "Release-note parser id");

  EvalOptions eval_opts, predict_opts, report_opts;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Train/test evaluation of every predictor");
  add_eval_options(evaluate_cmd, eval_opts, true);
  auto* predict_cmd = app.add_subcommand("predict", "Forecast PT, VT and FDSRI per device");
  add_eval_options(predict_cmd, predict_opts, true);
  bool histograms = false;
  auto* report_cmd = app.add_subcommand("report", "Corpus summary statistics and histograms");
  add_eval_options(report_cmd, report_opts, false);
  report_cmd->add_flag("--histograms", histograms, "Write 60-bin histogram CSV files");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }

  if (*ingest_cmd) {
    ingest.feed = feed;
    ingest.devices = devices;
    ingest.workspace = ingest_ws;
    for (const auto& n : notes) ingest.notes.emplace_back(n);
    return cmd_ingest(ingest, out, err);
  }
  const auto with_config = [&](const EvalOptions& o, auto&& command) {
    CliConfig config;
    try {
      config = to_config(o);
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      return kExitInput;
    }
    return command(config);
  };
  if (*evaluate_cmd) return with_config(eval_opts, [&](const CliConfig& c) { return cmd_evaluate(c, out, err); });
  if (*predict_cmd) return with_config(predict_opts, [&](const CliConfig& c) { return cmd_predict(c, out, err); });
  if (*report_cmd) {
    CliConfig config;
    config.workspace = report_opts.workspace;
    config.out = report_opts.out;
    return cmd_report(config, histograms, out, err);
  }
  return kExitInput;
}

}  // namespace devrisk::cli
