#pragma once

#include <cstdint>

namespace circlet {

// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stateless per-cell hash: the draw for (seed, r, c) is independent of call
// order, so any row partitioning reproduces the same mask.
inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t r, std::uint64_t c) {
  return mix64(seed ^ mix64(r ^ mix64(c)));
}

inline double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Sequential stream keyed by (seed, row). Rows own disjoint streams, so batch
// samplers stay deterministic under any worker count.
class RowRng {
 public:
  RowRng(std::uint64_t seed, std::uint64_t row) : base_(counter_hash(seed, row, 0x726f77ULL)) {}

  std::uint64_t next_u64() { return mix64(base_ + 0x632be59bd9b4e019ULL * ++k_); }
  double next_unit() { return to_unit(next_u64()); }

 private:
  std::uint64_t base_;
  std::uint64_t k_ = 0;
};

}  // namespace circlet
