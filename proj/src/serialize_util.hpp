#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "circlet/errors.hpp"
#include "circlet/logspace.hpp"

namespace circlet::detail {

// Log-probabilities are finite or -inf; JSON has no infinity literal, so -inf
// is written as the string token "-inf".
inline nlohmann::json encode_log(double v) {
  if (std::isinf(v) && v < 0) return "-inf";
  return v;
}

inline double decode_log(const nlohmann::json& j, const char* field) {
  if (j.is_string()) {
    if (j.get<std::string>() == "-inf") return kNegInf;
    throw ModelError(std::string(field) + ": unexpected token \"" + j.get<std::string>() + "\"");
  }
  if (!j.is_number()) throw ModelError(std::string(field) + ": expected a number or \"-inf\"");
  return j.get<double>();
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ModelError(path.string() + ": not a valid model file (" + e.what() + ")");
  }
}

inline void write_json_file(const nlohmann::json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ModelError("cannot write model file " + path.string());
  out << j.dump(1, '\t') << '\n';
  if (!out) throw ModelError("write failed for " + path.string());
}

inline void require_version(const nlohmann::json& j, int expected) {
  if (!j.contains("format_version") || !j["format_version"].is_number_integer())
    throw ModelError("missing format_version");
  const int got = j["format_version"].get<int>();
  if (got != expected) throw FormatVersionMismatch(expected, got);
}

}  // namespace circlet::detail
