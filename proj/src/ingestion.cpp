#include "devrisk/ingestion.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace devrisk {

namespace {

using json = nlohmann::json;

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

[[noreturn]] void malformed(std::size_t line_no, const std::string& why) {
  throw Error(ErrorCode::MalformedBlock, "line " + std::to_string(line_no) + ": " + why);
}

}  // namespace

// ---------------------------------------------------------------------------
// Release notes

std::vector<ReleaseNote> parse_reference_release_notes(std::string_view text) {
  std::vector<ReleaseNote> notes;
  bool in_block = false;
  std::set<std::string> seen_in_block;
  const auto lines = split_lines(text);

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const std::string_view line = trim(lines[i]);
    if (line.empty()) {
      in_block = false;
      continue;
    }
    if (line.starts_with("Firmware ") || line == "Firmware") {
      // Firmware <version> released <YYYY-MM-DD>
      const std::string_view rest = trim(line.substr(std::min<std::size_t>(line.size(), 9)));
      const std::size_t kw = rest.rfind(" released ");
      if (kw == std::string_view::npos) malformed(line_no, "firmware header without release date");
      const std::string_view version = trim(rest.substr(0, kw));
      const std::string_view date_text = trim(rest.substr(kw + 10));
      if (version.empty()) malformed(line_no, "firmware header without version");
      const auto date = Date::try_parse(date_text);
      if (!date) malformed(line_no, "invalid release date '" + std::string(date_text) + "'");
      notes.push_back(ReleaseNote{std::string(version), *date, {}});
      seen_in_block.clear();
      in_block = true;
      continue;
    }
    if (line.starts_with("Fixed:")) {
      if (!in_block) malformed(line_no, "'Fixed:' line outside a firmware block");
      std::string_view list = line.substr(6);
      while (!list.empty()) {
        const std::size_t comma = list.find(',');
        const std::string_view token = trim(list.substr(0, comma));
        list = comma == std::string_view::npos ? std::string_view{} : list.substr(comma + 1);
        if (token.empty()) continue;
        if (!is_valid_cve_id(token)) malformed(line_no, "invalid CVE id '" + std::string(token) + "'");
        if (seen_in_block.insert(std::string(token)).second) {
          notes.back().fixed_cves.emplace_back(token);
        }
      }
      continue;
    }
    // Free-form prose between the structured lines is ignored.
  }
  return notes;
}

ParserRegistry::ParserRegistry() {
  parsers_.emplace(std::string(kReferenceParserId), &parse_reference_release_notes);
}

ParserRegistry& ParserRegistry::global() {
  static ParserRegistry registry;
  return registry;
}

void ParserRegistry::add(std::string id, ReleaseNoteParser parser) {
  parsers_.insert_or_assign(std::move(id), std::move(parser));
}

bool ParserRegistry::contains(std::string_view id) const { return parsers_.find(id) != parsers_.end(); }

const ReleaseNoteParser& ParserRegistry::get(std::string_view id) const {
  auto it = parsers_.find(id);
  if (it == parsers_.end()) throw Error(ErrorCode::UnknownParser, "no release-note parser '" + std::string(id) + "'");
  return it->second;
}

std::vector<std::string> ParserRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : parsers_) out.push_back(id);
  return out;
}

std::vector<ReleaseNote> parse_release_notes(std::string_view text, std::string_view parser_id,
                                             const ParserRegistry& registry) {
  return registry.get(parser_id)(text);
}

// ---------------------------------------------------------------------------
// CVE feed

namespace {

[[noreturn]] void schema_error(std::size_t index, const std::string& field, const std::string& reason) {
  throw Error(ErrorCode::SchemaError,
              "entry " + std::to_string(index) + " field '" + field + "': " + reason);
}

}  // namespace

std::vector<CveFeedEntry> parse_cve_feed(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, std::string("field '<document>': ") + e.what());
  }
  if (!doc.is_array()) throw Error(ErrorCode::SchemaError, "field '<document>': expected a JSON array");

  std::vector<CveFeedEntry> entries;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& obj = doc[i];
    if (!obj.is_object()) schema_error(i, "<entry>", "expected an object");

    CveFeedEntry entry;
    auto id = obj.find("id");
    if (id == obj.end() || !id->is_string()) schema_error(i, "id", "missing or not a string");
    entry.cve_id = id->get<std::string>();
    if (!is_valid_cve_id(entry.cve_id)) schema_error(i, "id", "'" + entry.cve_id + "' is not a CVE id");

    auto published = obj.find("published");
    if (published == obj.end() || !published->is_string()) schema_error(i, "published", "missing or not a string");
    const auto date = Date::try_parse(published->get<std::string>());
    if (!date) schema_error(i, "published", "not an ISO-8601 date");
    entry.published = *date;

    auto cvss = obj.find("cvss_v2");
    if (cvss == obj.end() || !cvss->is_number()) schema_error(i, "cvss_v2", "missing or not a number");
    entry.cvss_v2 = cvss->get<double>();
    if (!(entry.cvss_v2 >= 0.0 && entry.cvss_v2 <= 10.0)) {
      schema_error(i, "cvss_v2", "value " + cvss->dump() + " outside [0, 10]");
    }

    auto products = obj.find("products");
    if (products == obj.end() || !products->is_array()) schema_error(i, "products", "missing or not an array");
    for (const json& p : *products) {
      if (!p.is_string()) schema_error(i, "products", "product keys must be strings");
      entry.products.push_back(p.get<std::string>());
    }

    if (!seen.insert(entry.cve_id).second) {
      throw Error(ErrorCode::DuplicateCve, entry.cve_id + " appears more than once in the feed");
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::vector<CveFeedEntry> load_cve_feed(const std::filesystem::path& path) {
  return parse_cve_feed(read_text_file(path));
}

// ---------------------------------------------------------------------------
// Dataset building

namespace {

struct KeyedPoint {
  SeriesPoint point;
  std::string cve_id;
};

template <typename Series>
Series to_series(const std::string& device_id, std::vector<KeyedPoint> keyed) {
  std::sort(keyed.begin(), keyed.end(), [](const KeyedPoint& a, const KeyedPoint& b) {
    if (a.point.date != b.point.date) return a.point.date < b.point.date;
    return a.cve_id < b.cve_id;
  });
  Series s;
  s.device_id = device_id;
  s.points.reserve(keyed.size());
  for (auto& k : keyed) s.points.push_back(k.point);
  return s;
}

}  // namespace

DeviceDataset build_device_dataset(const DeviceModel& device, std::span<const ReleaseNote> notes,
                                   std::span<const CveFeedEntry> feed) {
  const std::string key = device.product_key();
  DeviceDataset out;

  std::unordered_map<std::string, const CveFeedEntry*> in_feed;
  std::unordered_map<std::string, const CveFeedEntry*> for_device;
  for (const auto& entry : feed) {
    in_feed.emplace(entry.cve_id, &entry);
    if (std::find(entry.products.begin(), entry.products.end(), key) != entry.products.end()) {
      for_device.emplace(entry.cve_id, &entry);
    }
  }

  std::vector<KeyedPoint> severity;
  severity.reserve(for_device.size());
  for (const auto& [id, entry] : for_device) {
    severity.push_back({SeriesPoint{entry->published, entry->cvss_v2}, id});
  }
  out.severity = to_series<SeveritySeries>(device.id, std::move(severity));

  // Earliest note fixing each CVE.
  std::map<std::string, Date> first_fix;
  for (const auto& note : notes) {
    for (const auto& cve : note.fixed_cves) {
      auto [it, inserted] = first_fix.emplace(cve, note.release_date);
      if (!inserted && note.release_date < it->second) it->second = note.release_date;
    }
  }

  std::vector<KeyedPoint> patches;
  for (const auto& [cve, released] : first_fix) {
    auto dev = for_device.find(cve);
    if (dev == for_device.end()) {
      const bool known = in_feed.count(cve) != 0;
      out.warnings.push_back({ErrorCode::UnknownCveInNote, cve,
                              known ? cve + " is fixed in a note but not listed for product " + key
                                    : cve + " is fixed in a note but absent from the feed"});
      continue;
    }
    try {
      PatchEvent ev = make_patch_event(cve, dev->second->published, released);
      patches.push_back({SeriesPoint{ev.cve_published, static_cast<double>(ev.interval_days)}, cve});
      out.events.push_back(std::move(ev));
    } catch (const Error& e) {
      out.warnings.push_back({e.code(), cve, e.what()});
    }
  }
  std::sort(out.events.begin(), out.events.end(), [](const PatchEvent& a, const PatchEvent& b) {
    if (a.cve_published != b.cve_published) return a.cve_published < b.cve_published;
    return a.cve_id < b.cve_id;
  });
  out.patch = to_series<PatchIntervalSeries>(device.id, std::move(patches));
  return out;
}

// ---------------------------------------------------------------------------
// Workspace persistence

const DeviceModel* DatasetWorkspace::find_device(std::string_view id) const {
  for (const auto& d : devices) {
    if (d.id == id) return &d;
  }
  return nullptr;
}

void DatasetWorkspace::add_device(DeviceModel device, PatchIntervalSeries patch, SeveritySeries severity) {
  if (!is_valid_device_id(device.id)) {
    throw Error(ErrorCode::InvalidArgument, "invalid device id '" + device.id + "'");
  }
  if (find_device(device.id)) throw Error(ErrorCode::InvalidArgument, "duplicate device id '" + device.id + "'");
  if (patch.device_id.empty()) patch.device_id = device.id;
  if (severity.device_id.empty()) severity.device_id = device.id;
  if (patch.device_id != device.id || severity.device_id != device.id) {
    throw Error(ErrorCode::InvalidArgument, "series do not belong to device '" + device.id + "'");
  }
  series.emplace(device.id, DeviceSeries{std::move(patch), std::move(severity)});
  devices.push_back(std::move(device));
}

namespace {

json device_to_json(const DeviceModel& d) {
  json j = json::object();
  j["id"] = d.id;
  j["vendor"] = d.vendor;
  j["name"] = d.name;
  j["category"] = std::string(to_string(d.category));
  return j;
}

std::vector<DeviceModel> devices_from_json(const json& doc, const std::string& context, ErrorCode code) {
  if (!doc.is_array()) throw Error(code, context + ": expected a JSON array of devices");
  std::vector<DeviceModel> devices;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& obj = doc[i];
    const auto field = [&](const char* name) -> std::string {
      if (!obj.is_object()) throw Error(code, context + ": device " + std::to_string(i) + " is not an object");
      auto it = obj.find(name);
      if (it == obj.end() || !it->is_string()) {
        throw Error(code, context + ": device " + std::to_string(i) + " field '" + name + "' missing or not a string");
      }
      return it->get<std::string>();
    };
    DeviceModel d;
    d.id = field("id");
    d.vendor = field("vendor");
    d.name = field("name");
    try {
      d.category = parse_device_category(field("category"));
    } catch (const Error& e) {
      throw Error(code, context + ": " + e.what());
    }
    if (!is_valid_device_id(d.id)) throw Error(code, context + ": invalid device id '" + d.id + "'");
    if (!ids.insert(d.id).second) throw Error(code, context + ": duplicate device id '" + d.id + "'");
    devices.push_back(std::move(d));
  }
  return devices;
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

std::string series_csv(const DatedSeries& s, const char* header, bool integral) {
  std::string out = std::string(header) + "\n";
  for (const auto& p : s.points) {
    out += p.date.to_string();
    out += ',';
    if (integral) {
      out += std::to_string(static_cast<long long>(p.value));
    } else {
      out += format_number(p.value);
    }
    out += '\n';
  }
  return out;
}

template <typename Series>
Series load_series_csv(const std::filesystem::path& path, const std::string& device_id, const char* header,
                       bool integral, double lo, double hi) {
  const auto corrupt = [&](const std::string& why) -> Error {
    return Error(ErrorCode::CorruptWorkspace, path.filename().string() + ": " + why);
  };
  if (!std::filesystem::exists(path)) throw corrupt("missing file " + path.string());
  const std::string text = read_text_file(path);
  const auto lines = split_lines(text);
  if (lines.empty() || lines.front() != header) throw corrupt(std::string("expected header '") + header + "'");
  Series s;
  s.device_id = device_id;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string_view line = lines[i];
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string_view::npos) throw corrupt("line " + std::to_string(i + 1) + " has no comma");
    const auto date = Date::try_parse(line.substr(0, comma));
    if (!date) throw corrupt("line " + std::to_string(i + 1) + " has an invalid date");
    const std::string_view num = line.substr(comma + 1);
    double value = 0.0;
    if (integral) {
      long long iv = 0;
      auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), iv);
      if (ec != std::errc() || ptr != num.data() + num.size()) {
        throw corrupt("line " + std::to_string(i + 1) + " has an invalid integer");
      }
      value = static_cast<double>(iv);
    } else {
      auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), value);
      if (ec != std::errc() || ptr != num.data() + num.size()) {
        throw corrupt("line " + std::to_string(i + 1) + " has an invalid number");
      }
    }
    if (!(value >= lo && value <= hi)) throw corrupt("line " + std::to_string(i + 1) + " value out of range");
    if (!s.points.empty() && *date < s.points.back().date) {
      throw corrupt("line " + std::to_string(i + 1) + " breaks date ordering");
    }
    s.points.push_back({*date, value});
  }
  return s;
}

constexpr const char* kPatchHeader = "date,interval_days";
constexpr const char* kSeverityHeader = "date,cvss";

}  // namespace

std::vector<DeviceModel> parse_devices_json(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, std::string("devices: ") + e.what());
  }
  return devices_from_json(doc, "devices", ErrorCode::SchemaError);
}

std::vector<DeviceModel> load_devices_file(const std::filesystem::path& path) {
  return parse_devices_json(read_text_file(path));
}

void save_workspace(const DatasetWorkspace& ws, const std::filesystem::path& directory) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory / "patch", ec);
  if (!ec) fs::create_directories(directory / "sev", ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create workspace at " + directory.string() + ": " + ec.message());

  json devices = json::array();
  for (const auto& d : ws.devices) devices.push_back(device_to_json(d));
  write_file(directory / "devices.json", devices.dump(2) + "\n");

  for (const auto& d : ws.devices) {
    auto it = ws.series.find(d.id);
    DeviceSeries empty{{{d.id, {}}}, {{d.id, {}}}};
    const DeviceSeries& s = it == ws.series.end() ? empty : it->second;
    write_file(directory / "patch" / (d.id + ".csv"), series_csv(s.patch, kPatchHeader, true));
    write_file(directory / "sev" / (d.id + ".csv"), series_csv(s.severity, kSeverityHeader, false));
  }

  json prov = json::object();
  for (const auto& [file, digest] : ws.provenance) prov[file] = digest;
  write_file(directory / "provenance.json", prov.dump(2) + "\n");
}

DatasetWorkspace load_workspace(const std::filesystem::path& directory) {
  namespace fs = std::filesystem;
  const fs::path devices_path = directory / "devices.json";
  if (!fs::exists(devices_path)) {
    throw Error(ErrorCode::CorruptWorkspace, "devices.json: missing in " + directory.string());
  }
  json doc;
  try {
    doc = json::parse(read_text_file(devices_path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::CorruptWorkspace, std::string("devices.json: ") + e.what());
  }

  DatasetWorkspace ws;
  for (auto& d : devices_from_json(doc, "devices.json", ErrorCode::CorruptWorkspace)) {
    auto patch = load_series_csv<PatchIntervalSeries>(directory / "patch" / (d.id + ".csv"), d.id, kPatchHeader,
                                                      true, 0.0, std::numeric_limits<double>::max());
    auto sev = load_series_csv<SeveritySeries>(directory / "sev" / (d.id + ".csv"), d.id, kSeverityHeader, false,
                                               0.0, 10.0);
    ws.add_device(std::move(d), std::move(patch), std::move(sev));
  }

  const fs::path prov_path = directory / "provenance.json";
  if (fs::exists(prov_path)) {
    try {
      json prov = json::parse(read_text_file(prov_path));
      if (!prov.is_object()) throw Error(ErrorCode::CorruptWorkspace, "provenance.json: expected an object");
      for (auto& [file, digest] : prov.items()) {
        if (!digest.is_string()) throw Error(ErrorCode::CorruptWorkspace, "provenance.json: digest not a string");
        ws.provenance.emplace(file, digest.get<std::string>());
      }
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::CorruptWorkspace, std::string("provenance.json: ") + e.what());
    }
  }
  return ws;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::IoError, "SHA-256 computation failed");
  }
  std::string hex;
  hex.reserve(len * 2);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

}  // namespace devrisk
