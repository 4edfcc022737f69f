#include <doctest.h>

#include <fstream>
#include <sstream>

#include "devrisk/cli.hpp"
#include "devrisk/report.hpp"
#include "../support/expect.hpp"
#include "../support/simulate.hpp"

using namespace devrisk;
using testing::fixture;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "devrisk");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

Run ingest(const std::filesystem::path& ws, const std::string& feed = "feed.json") {
  return run_cli({"ingest", "--notes", fixture("cam1.txt").string(), "--notes", fixture("sw1.txt").string(), "--feed",
                  fixture(feed).string(), "--devices", fixture("devices.json").string(), "--workspace", ws.string()});
}

}  // namespace

TEST_CASE("cli ingest") {
  const auto dir = testing::scratch_dir("cli-ingest");
  const auto ok = ingest(dir / "ws");
  CHECK(ok.code == 0);
  CHECK(ok.out.find("cam1: cves=3 patches=2") != std::string::npos);
  CHECK(ok.out.find("1 warning(s)") != std::string::npos);
  CHECK(ok.err.find("CVE-2017-9999") != std::string::npos);
  const auto ws = load_workspace(dir / "ws");
  CHECK(ws.devices.size() == 2);
  CHECK(ws.provenance.count("feed.json") == 1);

  const auto bad = ingest(dir / "bad", "feed_bad_cvss.json");
  CHECK(bad.code == 2);
  CHECK(bad.err.find("cvss_v2") != std::string::npos);

  CHECK(run_cli({"ingest", "--feed", "x"}).code == 2);
  CHECK(run_cli({"frobnicate"}).code == 2);
  CHECK(run_cli({"--help"}).code == 0);
}

TEST_CASE("cli evaluate, predict and report") {
  const auto dir = testing::scratch_dir("cli-eval");
  save_workspace(sim::synthetic_corpus(2, 9), dir / "ws");
  const auto ws = (dir / "ws").string();

  const auto ev = run_cli({"evaluate", "--workspace", ws, "--max-p", "3", "--max-q", "3", "--jobs", "2"});
  CHECK(ev.code == 0);
  CHECK(ev.out.find("ARIMA") != std::string::npos);
  CHECK(std::filesystem::exists(dir / "ws" / "report.json"));
  CHECK(std::filesystem::exists(dir / "ws" / "report.csv"));

  const auto only_ar = run_cli({"evaluate", "--workspace", ws, "--predictors", "ar", "--out", (dir / "ar").string()});
  CHECK(only_ar.code == 0);
  const auto csv = read_text_file(dir / "ar" / "report.csv");
  CHECK(csv.find("AR,") != std::string::npos);
  CHECK(csv.find("SMA") == std::string::npos);
  CHECK(csv.find("TREND") == std::string::npos);

  const auto pred = run_cli({"predict", "--workspace", ws, "--predictors", "ar,sma"});
  CHECK(pred.code == 0);
  CHECK(std::count(pred.out.begin(), pred.out.end(), '\n') == 9);
  CHECK(pred.out.starts_with("dev100, "));
  CHECK(run_cli({"predict", "--workspace", ws, "--predictors", "ar,sma"}).out == pred.out);

  const auto rep = run_cli({"report", "--workspace", ws, "--histograms", "--out", (dir / "hist").string()});
  CHECK(rep.code == 0);
  CHECK(rep.out.find("patch interval days") != std::string::npos);
  const auto hist = read_text_file(dir / "hist" / "hist_patch_intervals.csv");
  CHECK(std::count(hist.begin(), hist.end(), '\n') == 61);
  CHECK(std::filesystem::exists(dir / "hist" / "hist_vulns_per_device.csv"));

  CHECK(run_cli({"evaluate", "--workspace", ws, "--ratio", "1.5"}).code == 2);
  CHECK(run_cli({"evaluate", "--workspace", ws, "--jobs", "0"}).code == 2);
  CHECK(run_cli({"evaluate", "--workspace", ws, "--predictors", "lstm"}).code == 2);
}

TEST_CASE("cli error paths") {
  const auto dir = testing::scratch_dir("cli-errors");
  save_workspace(DatasetWorkspace{}, dir / "empty");
  CHECK(run_cli({"evaluate", "--workspace", (dir / "empty").string()}).code == 2);
  CHECK(run_cli({"predict", "--workspace", (dir / "empty").string()}).code == 2);
  CHECK(run_cli({"report", "--workspace", (dir / "nowhere").string()}).code == 2);
}
