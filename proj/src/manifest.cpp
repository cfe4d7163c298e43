#include "circlet/manifest.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "circlet/bitmatrix.hpp"
#include "circlet/errors.hpp"

namespace circlet {

std::vector<DatasetEntry> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path.string() + ": not a valid manifest (" + e.what() + ")");
  }
  if (!j.contains("datasets") || !j["datasets"].is_array())
    throw DataError(path.string() + ": manifest needs a datasets array");

  const std::filesystem::path base = path.has_parent_path()
                                         ? path.parent_path()
                                         : std::filesystem::path(".");
  std::vector<DatasetEntry> entries;
  for (const auto& d : j["datasets"]) {
    DatasetEntry e;
    e.name = d.at("name").get<std::string>();
    e.path = d.at("path").get<std::string>();
    e.rows = d.at("rows").get<std::uint64_t>();
    e.cols = d.at("cols").get<std::uint64_t>();
    if (d.contains("fnv1a64") && !d["fnv1a64"].is_null())
      e.fnv1a64 = d["fnv1a64"].get<std::string>();
    e.resolved = base / e.path;
    entries.push_back(std::move(e));
  }
  return entries;
}

std::string fnv1a64_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
  return hex;
}

DatasetStatus verify_dataset(const DatasetEntry& entry) {
  DatasetStatus status;
  status.entry = entry;
  if (!std::filesystem::exists(entry.resolved)) {
    status.detail = "missing";
    return status;
  }
  status.present = true;

  const BitMatrix data = load_binary_csv(entry.resolved);
  status.shape_ok = data.rows() == entry.rows && data.cols() == entry.cols;
  if (!status.shape_ok) {
    status.detail = "shape " + std::to_string(data.rows()) + "x" + std::to_string(data.cols()) +
                    ", expected " + std::to_string(entry.rows) + "x" + std::to_string(entry.cols);
    return status;
  }

  if (entry.fnv1a64) {
    const std::string got = fnv1a64_file(entry.resolved);
    status.checksum_ok = got == *entry.fnv1a64;
    if (!status.checksum_ok) {
      status.detail = "checksum " + got + ", expected " + *entry.fnv1a64;
      return status;
    }
  } else {
    status.checksum_ok = true;  // nothing pinned
  }
  status.detail = "ok";
  return status;
}

}  // namespace circlet
