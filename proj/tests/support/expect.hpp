#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "devrisk/error.hpp"

namespace testing {

// Runs fn and reports the library error code it raised, if any.
template <typename Fn>
std::optional<devrisk::ErrorCode> error_code_of(Fn&& fn) {
  try {
    fn();
  } catch (const devrisk::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(DEVRISK_FIXTURE_DIR) / name;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("devrisk-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing
