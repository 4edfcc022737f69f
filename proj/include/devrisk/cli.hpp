#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "devrisk/evaluation.hpp"

namespace devrisk::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInput = 2;

struct CliConfig {
  std::filesystem::path workspace;
  /// Defaults to the workspace directory.
  std::filesystem::path out;
  EvaluationConfig evaluation;
};

struct IngestArgs {
  std::vector<std::filesystem::path> notes;
  std::filesystem::path feed;
  std::filesystem::path devices;
  std::filesystem::path workspace;
  std::string parser_id = "reference";
};

int cmd_ingest(const IngestArgs& args, std::ostream& out, std::ostream& err);
int cmd_evaluate(const CliConfig& config, std::ostream& out, std::ostream& err);
int cmd_predict(const CliConfig& config, std::ostream& out, std::ostream& err);
int cmd_report(const CliConfig& config, bool histograms, std::ostream& out, std::ostream& err);

/// Parses `args` (args[0] is the program name) and dispatches to a command.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace devrisk::cli
