#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace circlet {

// One dataset the CLI knows about: where it lives relative to the manifest,
// and what shape/content to expect.
struct DatasetEntry {
  std::string name;
  std::string path;  // relative to the manifest's directory
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
  std::optional<std::string> fnv1a64;  // hex content checksum, if pinned

  std::filesystem::path resolved;  // absolute path, filled by load_manifest
};

std::vector<DatasetEntry> load_manifest(const std::filesystem::path& path);

struct DatasetStatus {
  DatasetEntry entry;
  bool present = false;
  bool shape_ok = false;
  bool checksum_ok = false;  // true when no checksum is pinned
  std::string detail;
};

// Checks existence, N x V shape, and (when pinned) the content checksum.
DatasetStatus verify_dataset(const DatasetEntry& entry);

// FNV-1a 64-bit over the raw file bytes, lowercase hex.
std::string fnv1a64_file(const std::filesystem::path& path);

}  // namespace circlet
