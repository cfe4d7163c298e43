#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "circlet/bitmatrix.hpp"
#include "circlet/logspace.hpp"
#include "circlet/mask.hpp"
#include "circlet/pair_counts.hpp"

namespace circlet {

struct SmoothingSpec {
  double alpha = 0.01;  // Laplace pseudo-count, >= 0
};

// Rooted tree over binary variables with log-space conditional tables.
// log_factors[i][s][v] = log P(x_i = v | x_parent(i) = s); the root stores its
// prior in both s-rows so lookups need no special case.
struct Clt {
  std::int32_t var_count = 0;
  std::int32_t root = 0;
  std::vector<std::int32_t> parent;      // -1 at the root
  std::vector<std::int32_t> topo_order;  // root first, parents before children
  std::vector<std::array<std::array<double, 2>, 2>> log_factors;

  // Derived adjacency, rebuilt by fit/load; child lists are sorted ascending.
  std::vector<std::vector<std::int32_t>> children;

  double prior(int v) const { return log_factors[static_cast<std::size_t>(root)][0][v]; }

  // Rebuilds children and topo_order (breadth-first from the root) from the
  // parent array. topo_order comes back short when the links are cyclic.
  void rebuild_derived();
};

// Checks tree shape, topo order, and per-column normalization; throws
// InvariantViolation on failure.
void check_clt(const Clt& model);

// V x V mutual information (nats) from Laplace-smoothed pairwise tables. The
// smoothed joint is p(a,b) = (n_ij(a,b) + alpha) / (N + 4 alpha) and the
// marginals are its row/column sums, so every entry is a true MI and >= 0.
class MiTable {
 public:
  explicit MiTable(std::size_t vars) : vars_(vars), v_(vars * vars, 0.0) {}
  std::size_t var_count() const { return vars_; }
  double operator()(std::size_t i, std::size_t j) const { return v_[i * vars_ + j]; }
  double& at(std::size_t i, std::size_t j) { return v_[i * vars_ + j]; }

 private:
  std::size_t vars_;
  std::vector<double> v_;
};

MiTable mutual_information(const PairCounts& counts, const SmoothingSpec& smoothing);

// Dense Prim from `root`, as a parent array. Among maximum-weight candidate
// edges (i inside the tree, j outside) the lexicographically smallest (i, j)
// wins, as if candidates were scanned in ascending order, so the tree is
// deterministic even under weight ties.
std::vector<std::int32_t> max_spanning_tree(const MiTable& weights, std::int32_t root);

// Chow-Liu learning: maximum spanning tree of the MI matrix rooted at `root`,
// with Laplace-smoothed conditional frequencies. Deterministic given
// (data, alpha, root); jobs only affects counting speed.
Clt fit_clt(const BitMatrix& data, const SmoothingSpec& smoothing = {},
            std::optional<std::int32_t> root = std::nullopt, unsigned jobs = 1);

// Per-row log-likelihood of fully observed rows.
std::vector<double> clt_evi(const Clt& model, const BitMatrix& batch, unsigned jobs = 1,
                            Precision precision = Precision::kF64);

// Per-row log marginal probability: upward sum-product messages in log space,
// marginalized cells summed over both values.
std::vector<double> clt_mar(const Clt& model, const MaskedBatch& batch, unsigned jobs = 1,
                            Precision precision = Precision::kF64);

// Most probable completions of a batch of partial rows.
struct MpeBatch {
  BitMatrix completions;          // observed cells pass through
  std::vector<double> log_values; // EVI of each completion
  bool exact = true;              // max-product is exact on trees / deterministic circuits
};

// Max-product upward pass with per-(node, parent-state) argmax, then
// root-to-leaf backtracking. Argmax ties choose value 0.
MpeBatch clt_mpe(const Clt& model, const MaskedBatch& batch, unsigned jobs = 1,
                 Precision precision = Precision::kF64);

// n i.i.d. ancestral samples, reproducible from seed.
BitMatrix clt_sample(const Clt& model, std::size_t n, std::uint64_t seed);

// Versioned textual model file; numeric fields round-trip exactly.
void save_clt(const Clt& model, const std::filesystem::path& path);
Clt load_clt(const std::filesystem::path& path);

}  // namespace circlet
