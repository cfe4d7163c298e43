#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace circlet {

enum class NodeKind : std::uint8_t { kSum, kProduct, kLeaf };

// Fixed-capacity bitset over circuit variables.
class VarSet {
 public:
  VarSet() = default;
  explicit VarSet(std::size_t vars) : bits_((vars + 63) / 64, 0) {}

  void set(std::size_t i) { bits_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  bool test(std::size_t i) const { return (bits_[i >> 6] >> (i & 63)) & 1u; }

  VarSet& operator|=(const VarSet& o) {
    for (std::size_t w = 0; w < bits_.size(); ++w) bits_[w] |= o.bits_[w];
    return *this;
  }
  VarSet& operator&=(const VarSet& o) {
    for (std::size_t w = 0; w < bits_.size(); ++w) bits_[w] &= o.bits_[w];
    return *this;
  }
  bool intersects(const VarSet& o) const {
    for (std::size_t w = 0; w < bits_.size(); ++w)
      if (bits_[w] & o.bits_[w]) return true;
    return false;
  }
  bool contains(const VarSet& o) const {
    for (std::size_t w = 0; w < bits_.size(); ++w)
      if (o.bits_[w] & ~bits_[w]) return false;
    return true;
  }
  std::size_t count() const;

  bool operator==(const VarSet&) const = default;

 private:
  std::vector<std::uint64_t> bits_;
};

// One arena slot. Sum and product units reference a contiguous edge slice;
// sum weights sit in a parallel array aligned with the child slots.
struct CircuitNode {
  NodeKind kind = NodeKind::kLeaf;
  std::int32_t var = -1;                       // leaf only
  std::uint32_t edge_begin = 0;                // sum/product only
  std::uint32_t edge_count = 0;
  std::array<double, 2> log_p = {0.0, 0.0};    // leaf only: log P(x_var = v)
};

// Smooth decomposable DAG of sum/product/Bernoulli-leaf units in one arena.
// Children always sit strictly below their parent, so a single forward scan
// evaluates the circuit and acyclicity holds by construction.
struct Circuit {
  std::int32_t var_count = 0;
  std::uint32_t root = 0;
  std::vector<CircuitNode> nodes;
  std::vector<std::uint32_t> edges;
  std::vector<double> edge_log_weights;
  std::vector<VarSet> scope;  // cached per node; filled by builder and load

  std::span<const std::uint32_t> children_of(std::uint32_t id) const {
    const CircuitNode& n = nodes[id];
    return {edges.data() + n.edge_begin, n.edge_count};
  }
  std::span<const double> weights_of(std::uint32_t id) const {
    const CircuitNode& n = nodes[id];
    return {edge_log_weights.data() + n.edge_begin, n.edge_count};
  }
};

// Appends nodes in topological order and verifies unit invariants as it goes:
// child ids must already exist, products take >= 2 children, sum weights must
// normalize to 1 within 1e-9 (weights are stored untouched).
class CircuitBuilder {
 public:
  explicit CircuitBuilder(std::int32_t var_count);

  std::uint32_t leaf(std::int32_t var, double log_p0, double log_p1);
  std::uint32_t indicator(std::int32_t var, int value);
  std::uint32_t product(std::span<const std::uint32_t> children);
  std::uint32_t sum(std::span<const std::uint32_t> children, std::span<const double> log_weights);

  Circuit finish(std::uint32_t root) &&;

 private:
  Circuit circuit_;
};

enum class Tristate { kNo, kYes, kUnknown };

struct StructureReport {
  bool smooth = true;
  bool decomposable = true;
  // Disjoint child supports per sum: decided structurally for indicator-leaf
  // circuits, kUnknown when leaves carry general Bernoulli tables.
  Tristate deterministic = Tristate::kUnknown;
  std::size_t sum_count = 0;
  std::size_t product_count = 0;
  std::size_t leaf_count = 0;
  std::optional<std::uint32_t> smooth_violation;
  std::optional<std::uint32_t> decomposable_violation;
  std::optional<std::uint32_t> determinism_unknown_at;  // first unprovable sum
};

// Structural validation; throws DanglingChild / EmptySum / UnnormalizedSum /
// InvariantViolation on malformed arenas, reports the property flags
// otherwise.
StructureReport validate(const Circuit& c);

// Per-node variable sets in one forward pass (fresh computation; c.scope is
// the cached copy).
std::vector<VarSet> scope_of(const Circuit& c);

void save_circuit(const Circuit& c, const std::filesystem::path& path);
Circuit load_circuit(const std::filesystem::path& path);

}  // namespace circlet
