#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace circlet {

// Anything wrong with an input dataset file.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MalformedRow final : DataError {
  MalformedRow(const std::string& path, std::size_t line, const std::string& detail)
      : DataError(path + ":" + std::to_string(line) + ": " + detail), line(line) {}
  std::size_t line;
};

struct EmptyFile final : DataError {
  explicit EmptyFile(const std::string& path) : DataError(path + ": empty dataset") {}
};

// Anything wrong with a model: construction, file contents, or query inputs.
struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch final : ModelError {
  DimensionMismatch(std::size_t expected, std::size_t got)
      : ModelError("dimension mismatch: model has " + std::to_string(expected) +
                   " variables, batch has " + std::to_string(got) + " columns") {}
};

// alpha = 0 and an empty parent-state slice: the conditional is 0/0.
struct DegenerateTable final : ModelError {
  DegenerateTable(std::int32_t var, std::int32_t parent, int state)
      : ModelError("degenerate conditional table for variable " + std::to_string(var) +
                   " given parent " + std::to_string(parent) + " = " + std::to_string(state) +
                   " (no samples and alpha = 0)"),
        var(var), parent(parent), state(state) {}
  std::int32_t var;
  std::int32_t parent;
  int state;
};

struct FormatVersionMismatch final : ModelError {
  FormatVersionMismatch(int expected, int got)
      : ModelError("unsupported format_version " + std::to_string(got) + " (expected " +
                   std::to_string(expected) + ")") {}
};

struct InvariantViolation : ModelError {
  InvariantViolation(std::uint32_t node, const std::string& detail)
      : ModelError("node " + std::to_string(node) + ": " + detail), node(node) {}
  std::uint32_t node;
};

struct DanglingChild final : InvariantViolation {
  DanglingChild(std::uint32_t node, std::uint32_t child)
      : InvariantViolation(node, "child id " + std::to_string(child) +
                                     " is not strictly below its parent") {}
};

struct EmptySum final : InvariantViolation {
  explicit EmptySum(std::uint32_t node) : InvariantViolation(node, "sum unit has no children") {}
};

struct UnnormalizedSum final : InvariantViolation {
  UnnormalizedSum(std::uint32_t node, double log_total)
      : InvariantViolation(node, "sum weights do not normalize (logsumexp = " +
                                     std::to_string(log_total) + ")") {}
};

struct TooManyVariables final : ModelError {
  explicit TooManyVariables(std::size_t vars)
      : ModelError("brute-force reference capped at 20 variables, got " + std::to_string(vars)) {}
};

struct ZeroEvidenceProbability final : ModelError {
  explicit ZeroEvidenceProbability(std::size_t row)
      : ModelError("row " + std::to_string(row) +
                   ": evidence has probability zero under the model"),
        row(row) {}
  std::size_t row;
};

}  // namespace circlet
