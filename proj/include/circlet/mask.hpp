#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "circlet/bitmatrix.hpp"

namespace circlet {

enum class Cell : std::uint8_t { kObs0 = 0, kObs1 = 1, kMarg = 2 };

struct MaskSpec {
  double p = 0.5;          // probability a cell is marginalized
  std::uint64_t seed = 0;  // reproducibility seed
};

// Per-cell query states: observed 0, observed 1, or marginalized.
class MaskedBatch {
 public:
  MaskedBatch() = default;
  MaskedBatch(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), cells_(rows * cols, Cell::kObs0) {}

  static MaskedBatch from_data(const BitMatrix& data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Cell at(std::size_t r, std::size_t c) const { return cells_[r * cols_ + c]; }
  void set(std::size_t r, std::size_t c, Cell v) { cells_[r * cols_ + c] = v; }

  std::size_t marg_count() const;

  // Requires zero kMarg cells.
  BitMatrix to_bitmatrix() const;

  bool operator==(const MaskedBatch&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Cell> cells_;
};

// Each cell is marginalized with probability spec.p, independently, from a
// counter RNG keyed by (seed, row, column); otherwise it observes the data
// bit. A pure function of (data, spec).
MaskedBatch gen_mask(const BitMatrix& data, const MaskSpec& spec);

}  // namespace circlet
