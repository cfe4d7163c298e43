#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "circlet/bitmatrix.hpp"

namespace circlet {

// Pairwise co-occurrence counts n_ij(a, b) for all variable pairs. Only the
// both-ones matrix and per-column one-counts are stored; the remaining cells
// of each 2x2 table follow from N by inclusion-exclusion.
class PairCounts {
 public:
  PairCounts(std::uint64_t n, std::size_t vars, std::vector<std::uint32_t> ones,
             std::vector<std::uint32_t> both_ones)
      : n_(n), vars_(vars), ones_(std::move(ones)), both_(std::move(both_ones)) {}

  std::uint64_t n() const { return n_; }
  std::size_t var_count() const { return vars_; }

  std::uint64_t ones(std::size_t i) const { return ones_[i]; }
  std::uint64_t both(std::size_t i, std::size_t j) const { return both_[i * vars_ + j]; }

  // Rows with column i = a and column j = b.
  std::uint64_t count(std::size_t i, std::size_t j, int a, int b) const {
    const std::uint64_t c11 = both(i, j);
    if (a && b) return c11;
    if (a) return ones_[i] - c11;
    if (b) return ones_[j] - c11;
    return n_ - ones_[i] - ones_[j] + c11;
  }

 private:
  std::uint64_t n_;
  std::size_t vars_;
  std::vector<std::uint32_t> ones_;
  std::vector<std::uint32_t> both_;
};

// Word-wise AND + popcount over packed columns; parallel over column pairs.
// The result is bit-identical for every jobs value.
PairCounts pairwise_counts(const BitMatrix& data, unsigned jobs = 1);

}  // namespace circlet
