#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "devrisk/core.hpp"

namespace devrisk {

struct ReleaseNote {
  std::string firmware_version;
  Date release_date;
  std::vector<std::string> fixed_cves;

  friend bool operator==(const ReleaseNote&, const ReleaseNote&) = default;
};

struct CveFeedEntry {
  std::string cve_id;
  Date published;
  double cvss_v2 = 0.0;
  std::vector<std::string> products;

  friend bool operator==(const CveFeedEntry&, const CveFeedEntry&) = default;
};

using ReleaseNoteParser = std::function<std::vector<ReleaseNote>(std::string_view text)>;

inline constexpr std::string_view kReferenceParserId = "reference";

/// Vendor-specific release-note parsers keyed by id. The reference grammar is
/// always registered under kReferenceParserId.
class ParserRegistry {
 public:
  ParserRegistry();

  static ParserRegistry& global();

  void add(std::string id, ReleaseNoteParser parser);
  bool contains(std::string_view id) const;
  const ReleaseNoteParser& get(std::string_view id) const;
  std::vector<std::string> ids() const;

 private:
  std::map<std::string, ReleaseNoteParser, std::less<>> parsers_;
};

/// Reference grammar:
///
///   Firmware <version> released <YYYY-MM-DD>
///   Fixed: CVE-YYYY-NNNN, CVE-YYYY-NNNN
///
/// Blocks are blank-line separated; `Fixed:` lines are optional and may repeat.
/// Other text inside a block is ignored. A `Firmware` line without a valid date,
/// or a `Fixed:` line outside a block, raises MalformedBlock with the line number.
std::vector<ReleaseNote> parse_reference_release_notes(std::string_view text);

std::vector<ReleaseNote> parse_release_notes(std::string_view text, std::string_view parser_id,
                                             const ParserRegistry& registry = ParserRegistry::global());

std::vector<CveFeedEntry> parse_cve_feed(std::string_view json_text);
std::vector<CveFeedEntry> load_cve_feed(const std::filesystem::path& path);

struct IngestWarning {
  ErrorCode code = ErrorCode::InvalidArgument;
  std::string cve_id;
  std::string message;
};

struct DeviceDataset {
  PatchIntervalSeries patch;
  SeveritySeries severity;
  std::vector<PatchEvent> events;
  std::vector<IngestWarning> warnings;
};

/// Joins release notes and the CVE feed for one device. Dangling CVEs in
/// notes and patches dated before publication become warnings; the affected
/// event is dropped.
DeviceDataset build_device_dataset(const DeviceModel& device, std::span<const ReleaseNote> notes,
                                   std::span<const CveFeedEntry> feed);

struct DeviceSeries {
  PatchIntervalSeries patch;
  SeveritySeries severity;

  friend bool operator==(const DeviceSeries&, const DeviceSeries&) = default;
};

struct DatasetWorkspace {
  std::vector<DeviceModel> devices;
  std::map<std::string, DeviceSeries> series;
  /// Source file name -> SHA-256 hex digest.
  std::map<std::string, std::string> provenance;

  const DeviceModel* find_device(std::string_view id) const;
  /// Registers a device and its series. Throws InvalidArgument on duplicate or
  /// invalid ids, or when the series carry another device's id.
  void add_device(DeviceModel device, PatchIntervalSeries patch, SeveritySeries severity);

  friend bool operator==(const DatasetWorkspace&, const DatasetWorkspace&) = default;
};

std::vector<DeviceModel> parse_devices_json(std::string_view json_text);
std::vector<DeviceModel> load_devices_file(const std::filesystem::path& path);

void save_workspace(const DatasetWorkspace& ws, const std::filesystem::path& directory);
DatasetWorkspace load_workspace(const std::filesystem::path& directory);

std::string read_text_file(const std::filesystem::path& path);
std::string sha256_hex(std::string_view data);

}  // namespace devrisk
