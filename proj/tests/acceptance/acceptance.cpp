// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "devrisk/adf.hpp"
#include "devrisk/ar.hpp"
#include "devrisk/arima.hpp"
#include "devrisk/changepoint.hpp"
#include "devrisk/cli.hpp"
#include "devrisk/evaluation.hpp"
#include "devrisk/forecast.hpp"
#include "devrisk/trend.hpp"
#include "../support/expect.hpp"
#include "../support/oracles.hpp"
#include "../support/simulate.hpp"

using namespace devrisk;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Check {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok) {
      outcome_.pass = false;
      if (failures_++ < 3) outcome_.detail += (outcome_.detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& text) {
    if (outcome_.pass) outcome_.detail += (outcome_.detail.empty() ? "" : "; ") + text;
  }
  Outcome result() const { return outcome_; }

 private:
  Outcome outcome_;
  int failures_ = 0;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

using PT = PatchTrendCategory;
using VT = VulnTrendCategory;

Outcome risk_matrix() {
  Check c;
  const RiskLevel table[3][3] = {{RiskLevel::Low, RiskLevel::Low, RiskLevel::Medium},
                                 {RiskLevel::Low, RiskLevel::Medium, RiskLevel::High},
                                 {RiskLevel::Medium, RiskLevel::High, RiskLevel::Critical}};
  for (int v = 0; v < 3; ++v) {
    for (int p = 0; p < 3; ++p) {
      const auto got = combine_fdsri(kAllVulnTrends[v], kAllPatchTrends[p]);
      c.require(got == table[v][p], std::string("cell ") + std::string(to_string(kAllVulnTrends[v])) + "/" +
                                        std::string(to_string(kAllPatchTrends[p])));
      if (p < 2) c.require(combine_fdsri(kAllVulnTrends[v], kAllPatchTrends[p + 1]) >= got, "monotone in PT");
      if (v < 2) c.require(combine_fdsri(kAllVulnTrends[v + 1], kAllPatchTrends[p]) >= got, "monotone in VT");
    }
  }
  c.note("9 cells + monotonicity");
  return c.result();
}

Outcome thresholds() {
  Check c;
  const auto pt = [](double d) { return classify_patch_trend(std::vector<double>{d, d}).category; };
  const auto vt = [](double s) { return classify_vulnerability_trend(std::vector<double>{s, s}).category; };
  c.require(pt(22) == PT::Fast, "PT 22");
  c.require(pt(23) == PT::Medium, "PT 23");
  c.require(pt(413) == PT::Medium, "PT 413");
  c.require(pt(414) == PT::Slow, "PT 414");
  c.require(vt(3.9) == VT::Low, "VT 3.9");
  c.require(vt(4.0) == VT::Medium, "VT 4.0");
  c.require(vt(6.9) == VT::Medium, "VT 6.9");
  c.require(vt(7.0) == VT::High, "VT 7.0");
  const auto pf = classify_patch_trend(std::vector<double>{5});
  c.require(pf.category == PT::Slow && pf.fallback, "PT fallback");
  c.require(classify_patch_trend(std::vector<double>{}).category == PT::Slow, "PT empty fallback");
  const auto vf = classify_vulnerability_trend(std::vector<double>{9.9});
  c.require(vf.category == VT::Low && vf.fallback, "VT fallback");
  return c.result();
}

Outcome ar_recovery() {
  Check c;
  const double truth[] = {0.5, -0.3};
  int order2 = 0;
  double worst = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto y = sim::ar_process(31000 + seed, 500, {0.5, -0.3});
    const auto m = fit_ar(y, 12);
    order2 += m.lag_order == 2;
    for (int i = 0; i < std::max(2, m.lag_order); ++i) {
      const double est = i < m.lag_order ? m.coefficients[static_cast<std::size_t>(i)] : 0.0;
      const double want = i < 2 ? truth[i] : 0.0;
      worst = std::max(worst, std::abs(est - want));
    }
  }
  c.require(worst < 0.1, fmt("max coefficient error %.3f", worst));
  c.require(order2 >= 8, fmt("p=2 chosen %.0f/10", order2));
  c.note(fmt("max coef error %.3f, p=2 in %.0f/10", worst, order2));
  return c.result();
}

Outcome adf_calibration() {
  Check c;
  int noise = 0, walk = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    noise += adf_test(sim::white_noise(41000 + seed, 200)).reject_unit_root;
    walk += adf_test(sim::random_walk(42000 + seed, 200)).reject_unit_root;
  }
  c.require(noise >= 90, fmt("white noise rejected %.0f/100", noise));
  c.require(walk <= 10, fmt("random walk rejected %.0f/100", walk));
  c.note(fmt("white noise rejected %.0f/100, random walk %.0f/100", noise, walk));
  return c.result();
}

Outcome arima_selection() {
  Check c;
  int rw = 0, stat = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    rw += select_arima_order(sim::random_walk(51000 + seed, 300)).d == 1;
    stat += select_arima_order(sim::ar_process(52000 + seed, 300, {0.6})).d == 0;
  }
  c.require(rw >= 18, fmt("random walk d=1 %.0f/20", rw));
  c.require(stat >= 18, fmt("AR(1) d=0 %.0f/20", stat));
  double worst = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    for (int p = 1; p <= 2; ++p) {
      const auto y = sim::ar_process(53000 + seed, 500, p == 1 ? std::vector<double>{0.6} : std::vector<double>{0.5, -0.3},
                                     1.5);
      const auto a = fit_ar_order(y, p);
      const auto b = fit_arima(y, {p, 0, 0});
      for (int i = 0; i < p; ++i) {
        worst = std::max(worst, std::abs(a.coefficients[static_cast<std::size_t>(i)] - b.ar[static_cast<std::size_t>(i)]));
      }
    }
  }
  c.require(worst < 1e-3, fmt("ARIMA(p,0,0) vs AR differ by %.2e", worst));
  c.note(fmt("d=1 %.0f/20, d=0 %.0f/20, AR agreement %.1e", rw, stat, worst));
  return c.result();
}

Outcome metric_oracles() {
  Check c;
  std::mt19937_64 rng(61000);
  std::uniform_real_distribution<double> u(-1000, 1000);
  std::uniform_int_distribution<int> len(1, 60);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> f(static_cast<std::size_t>(len(rng))), o(f.size());
    for (auto& x : f) x = u(rng);
    for (auto& x : o) x = u(rng);
    worst = std::max(worst, std::abs(rmse(f, o) - oracle::rmse(f, o)));
    worst = std::max(worst, std::abs(mad(f, o) - oracle::mad(f, o)));
    const int w = 1 + static_cast<int>(rng() % f.size());
    const auto got = sma_forecast(f, w, 10).values;
    const auto want = oracle::sma(f, w, 10);
    for (std::size_t k = 0; k < got.size(); ++k) worst = std::max(worst, std::abs(got[k] - want[k]));
  }
  c.require(worst <= 1e-9, fmt("max deviation %.2e", worst));
  c.note(fmt("max deviation %.1e over 1000 vectors", worst));
  return c.result();
}

Outcome changepoint_model() {
  Check c;
  const Date start = Date::parse("2015-01-01");
  std::vector<double> two(100), line(80);
  for (std::size_t i = 0; i < 100; ++i) two[i] = i < 50 ? static_cast<double>(i) : 49.0;
  for (std::size_t i = 0; i < line.size(); ++i) line[i] = 2.0 * static_cast<double>(i) + 1.0;
  const auto regime = fit_trend_fixed_tau(sim::daily(two, start), 2.1);
  const double slope = regime.slope_per_day(start.plus_days(120));
  c.require(std::abs(slope) < 0.1, fmt("post-break slope %.4f", slope));

  double worst = 0;
  const auto pts = sim::daily(line, start);
  for (double tau : TrendConfig{}.tau_grid) {
    const auto m = fit_trend_fixed_tau(pts, tau);
    for (int h = 1; h <= 20; ++h) {
      const double t = static_cast<double>(line.size()) - 1.0 + h;
      worst = std::max(worst, std::abs(m.predict(start.plus_days(static_cast<std::int64_t>(t))) - (2.0 * t + 1.0)));
    }
  }
  c.require(worst < 1e-6, fmt("linear forecast error %.2e", worst));
  c.note(fmt("post-break slope %.4f, linear error %.1e", slope, worst));
  return c.result();
}

Outcome clamping() {
  Check c;
  std::mt19937_64 rng(81000);
  std::uniform_real_distribution<double> u(-1e4, 1e4);
  std::uniform_int_distribution<int> len(1, 30);
  for (int i = 0; i < 10000; ++i) {
    ForecastResult r;
    r.values.resize(static_cast<std::size_t>(len(rng)));
    for (auto& x : r.values) x = u(rng);
    if (i % 97 == 0) r.values[0] = std::numeric_limits<double>::infinity();
    if (i % 89 == 0) r.values.back() = -std::numeric_limits<double>::infinity();
    if (i % 83 == 0) r.values.back() = std::nan("");
    const auto vt = clamp_forecast(r, kCvssFloor, kCvssCeiling);
    for (double v : vt.values) c.require(v >= 0.0 && v <= 10.0, fmt("VT value %.3f", v));
    const auto pt = clamp_forecast(r, 0.0);
    for (double v : pt.values) c.require(v >= 0.0, fmt("PT value %.3f", v));
  }
  c.note("10000 forecasts");
  return c.result();
}

Outcome synthetic_corpus() {
  Check c;
  const auto ws = sim::synthetic_corpus(20260101, 60);
  EvaluationConfig cfg;
  cfg.jobs = 4;
  const auto evals = evaluate_workspace(ws, cfg);
  const auto report = aggregate_corpus(evals, cfg.predictors);
  const double acc = report.best.fdsri.accuracy_pct();
  c.require(acc >= 80.0, fmt("FDSRI accuracy %.2f%%", acc));
  int regimes = 0;
  for (int v = 0; v < 3; ++v)
    for (int p = 0; p < 3; ++p) {
      bool seen = false;
      for (const auto& e : evals) seen |= e.observed_vt == kAllVulnTrends[v] && e.observed_pt == kAllPatchTrends[p];
      regimes += seen;
    }
  c.require(regimes == 9, fmt("%.0f of 9 regimes observed", regimes));
  c.note(fmt("best-per-device FDSRI accuracy %.2f%% (PT %.2f%%, VT %.2f%%)", acc, report.best.pt.accuracy_pct(),
             report.best.vt.accuracy_pct()));
  return c.result();
}

Outcome ingestion_golden() {
  Check c;
  const auto feed = load_cve_feed(testing::fixture("feed.json"));
  const auto notes = parse_release_notes(read_text_file(testing::fixture("cam1.txt")), "reference");
  const auto ds = build_device_dataset({"cam1", "acme", "cam-one", DeviceCategory::CCTV}, notes, feed);
  const std::vector<SeriesPoint> patch{{Date::parse("2018-01-01"), 151},
                                       {Date::parse("2018-03-10"), double(oracle::day_count(2018, 3, 10, 2019, 1, 1))}};
  const std::vector<SeriesPoint> sev{{Date::parse("2018-01-01"), 7.5},
                                     {Date::parse("2018-03-10"), 5.0},
                                     {Date::parse("2019-02-01"), 10.0}};
  c.require(ds.patch.points == patch, "patch series");
  c.require(ds.severity.points == sev, "severity series");
  c.require(ds.warnings.size() == 1 && ds.warnings[0].code == ErrorCode::UnknownCveInNote &&
                ds.warnings[0].cve_id == "CVE-2017-9999",
            "dangling CVE warning");
  c.note("151-day interval, earliest-fix rule, dangling CVE warning");
  return c.result();
}

Outcome determinism() {
  Check c;
  const auto dir = testing::scratch_dir("acceptance-determinism");
  save_workspace(sim::synthetic_corpus(777, 24), dir / "ws");
  std::vector<std::string> reports;
  for (const char* jobs : {"1", "4", "1"}) {
    std::ostringstream out, err;
    const auto target = dir / (std::string("out-") + std::to_string(reports.size()));
    const int code = cli::run({"devrisk", "evaluate", "--workspace", (dir / "ws").string(), "--jobs", jobs, "--out",
                               target.string()},
                              out, err);
    c.require(code == 0, "evaluate exit " + std::to_string(code) + ": " + err.str());
    reports.push_back(read_text_file(target / "report.json"));
  }
  c.require(reports[0] == reports[1], "jobs=1 vs jobs=4 differ");
  c.require(reports[0] == reports[2], "repeat run differs");
  c.note("3 runs byte-identical (" + std::to_string(reports[0].size()) + " bytes)");
  return c.result();
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> fn;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "risk matrix exactness", 1, risk_matrix},
      {2, "threshold boundaries", 1, thresholds},
      {3, "AR recovery", 5, ar_recovery},
      {4, "ADF calibration", 20, adf_calibration},
      {5, "ARIMA order selection", 60, arima_selection},
      {6, "metric oracles", 10, metric_oracles},
      {7, "changepoint model", 10, changepoint_model},
      {8, "clamping", 5, clamping},
      {9, "synthetic corpus FDSRI", 60, synthetic_corpus},
      {10, "ingestion golden files", 1, ingestion_golden},
      {11, "determinism", 60, determinism},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > cr.budget_s) {
      o.pass = false;
      o.detail += fmt("; runtime %.2fs over %.0fs budget", secs, cr.budget_s);
    }
    failed += !o.pass;
    std::printf("%s criterion %2d %-24s %7.2fs  %s\n", o.pass ? "PASS" : "FAIL", cr.id, cr.name, secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
