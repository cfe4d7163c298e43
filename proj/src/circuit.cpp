#include "circlet/circuit.hpp"

#include <bit>
#include <cmath>

#include "circlet/errors.hpp"
#include "circlet/logspace.hpp"

namespace circlet {

std::size_t VarSet::count() const {
  std::size_t total = 0;
  for (std::uint64_t w : bits_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

CircuitBuilder::CircuitBuilder(std::int32_t var_count) {
  if (var_count < 1) throw ModelError("circuit needs at least one variable");
  circuit_.var_count = var_count;
}

std::uint32_t CircuitBuilder::leaf(std::int32_t var, double log_p0, double log_p1) {
  if (var < 0 || var >= circuit_.var_count)
    throw InvariantViolation(static_cast<std::uint32_t>(circuit_.nodes.size()),
                             "leaf variable out of range");
  CircuitNode n;
  n.kind = NodeKind::kLeaf;
  n.var = var;
  n.log_p = {log_p0, log_p1};
  circuit_.nodes.push_back(n);
  VarSet s(static_cast<std::size_t>(circuit_.var_count));
  s.set(static_cast<std::size_t>(var));
  circuit_.scope.push_back(std::move(s));
  return static_cast<std::uint32_t>(circuit_.nodes.size() - 1);
}

std::uint32_t CircuitBuilder::indicator(std::int32_t var, int value) {
  return value ? leaf(var, kNegInf, 0.0) : leaf(var, 0.0, kNegInf);
}

std::uint32_t CircuitBuilder::product(std::span<const std::uint32_t> children) {
  const auto id = static_cast<std::uint32_t>(circuit_.nodes.size());
  if (children.size() < 2)
    throw InvariantViolation(id, "product unit needs at least 2 children");
  VarSet s(static_cast<std::size_t>(circuit_.var_count));
  for (std::uint32_t c : children) {
    if (c >= id) throw DanglingChild(id, c);
    s |= circuit_.scope[c];
  }
  CircuitNode n;
  n.kind = NodeKind::kProduct;
  n.edge_begin = static_cast<std::uint32_t>(circuit_.edges.size());
  n.edge_count = static_cast<std::uint32_t>(children.size());
  circuit_.edges.insert(circuit_.edges.end(), children.begin(), children.end());
  circuit_.edge_log_weights.resize(circuit_.edges.size(), 0.0);
  circuit_.nodes.push_back(n);
  circuit_.scope.push_back(std::move(s));
  return id;
}

std::uint32_t CircuitBuilder::sum(std::span<const std::uint32_t> children,
                                  std::span<const double> log_weights) {
  const auto id = static_cast<std::uint32_t>(circuit_.nodes.size());
  if (children.empty()) throw EmptySum(id);
  if (children.size() != log_weights.size())
    throw InvariantViolation(id, "one weight per child required");
  const double log_total = log_sum_exp(log_weights);
  if (std::abs(log_total) > 1e-9) throw UnnormalizedSum(id, log_total);
  VarSet s(static_cast<std::size_t>(circuit_.var_count));
  for (std::uint32_t c : children) {
    if (c >= id) throw DanglingChild(id, c);
    s |= circuit_.scope[c];
  }
  CircuitNode n;
  n.kind = NodeKind::kSum;
  n.edge_begin = static_cast<std::uint32_t>(circuit_.edges.size());
  n.edge_count = static_cast<std::uint32_t>(children.size());
  circuit_.edges.insert(circuit_.edges.end(), children.begin(), children.end());
  circuit_.edge_log_weights.insert(circuit_.edge_log_weights.end(), log_weights.begin(),
                                   log_weights.end());
  circuit_.nodes.push_back(n);
  circuit_.scope.push_back(std::move(s));
  return id;
}

Circuit CircuitBuilder::finish(std::uint32_t root) && {
  if (root >= circuit_.nodes.size()) throw ModelError("root node id out of range");
  circuit_.root = root;
  return std::move(circuit_);
}

std::vector<VarSet> scope_of(const Circuit& c) {
  std::vector<VarSet> scopes;
  scopes.reserve(c.nodes.size());
  for (std::uint32_t id = 0; id < c.nodes.size(); ++id) {
    const CircuitNode& n = c.nodes[id];
    VarSet s(static_cast<std::size_t>(c.var_count));
    if (n.kind == NodeKind::kLeaf) {
      s.set(static_cast<std::size_t>(n.var));
    } else {
      for (std::uint32_t child : c.children_of(id)) s |= scopes[child];
    }
    scopes.push_back(std::move(s));
  }
  return scopes;
}

namespace {

bool is_indicator(const CircuitNode& n) {
  const auto ind = [](double a, double b) { return a == 0.0 && std::isinf(b) && b < 0; };
  return ind(n.log_p[0], n.log_p[1]) || ind(n.log_p[1], n.log_p[0]);
}

}  // namespace

StructureReport validate(const Circuit& c) {
  if (c.nodes.empty()) throw ModelError("empty circuit arena");
  if (c.var_count < 1) throw ModelError("circuit needs at least one variable");
  if (c.root >= c.nodes.size()) throw ModelError("root node id out of range");

  StructureReport report;
  for (std::uint32_t id = 0; id < c.nodes.size(); ++id) {
    const CircuitNode& n = c.nodes[id];
    switch (n.kind) {
      case NodeKind::kLeaf:
        ++report.leaf_count;
        if (n.var < 0 || n.var >= c.var_count)
          throw InvariantViolation(id, "leaf variable out of range");
        break;
      case NodeKind::kProduct:
        ++report.product_count;
        if (n.edge_count < 2)
          throw InvariantViolation(id, "product unit needs at least 2 children");
        break;
      case NodeKind::kSum: {
        ++report.sum_count;
        if (n.edge_count == 0) throw EmptySum(id);
        const double log_total = log_sum_exp(c.weights_of(id));
        if (std::abs(log_total) > 1e-9) throw UnnormalizedSum(id, log_total);
        break;
      }
    }
    if (n.kind != NodeKind::kLeaf) {
      if (static_cast<std::size_t>(n.edge_begin) + n.edge_count > c.edges.size())
        throw InvariantViolation(id, "edge slice out of range");
      for (std::uint32_t child : c.children_of(id))
        if (child >= id) throw DanglingChild(id, child);
    }
  }

  const std::vector<VarSet> scopes = scope_of(c);
  if (scopes[c.root].count() != static_cast<std::size_t>(c.var_count))
    throw InvariantViolation(c.root, "root scope does not cover every variable");

  for (std::uint32_t id = 0; id < c.nodes.size() && report.smooth; ++id) {
    const CircuitNode& n = c.nodes[id];
    if (n.kind != NodeKind::kSum) continue;
    for (std::uint32_t child : c.children_of(id))
      if (!(scopes[child] == scopes[c.children_of(id)[0]])) {
        report.smooth = false;
        report.smooth_violation = id;
        break;
      }
  }
  for (std::uint32_t id = 0; id < c.nodes.size() && report.decomposable; ++id) {
    const CircuitNode& n = c.nodes[id];
    if (n.kind != NodeKind::kProduct) continue;
    VarSet seen(static_cast<std::size_t>(c.var_count));
    for (std::uint32_t child : c.children_of(id)) {
      if (seen.intersects(scopes[child])) {
        report.decomposable = false;
        report.decomposable_violation = id;
        break;
      }
      seen |= scopes[child];
    }
  }

  // Structural determinism: per node, which values each variable can take
  // inside its support. Two sum children with value-disjoint sets on a shared
  // variable cannot overlap. Sound for indicator leaves; a general Bernoulli
  // leaf admits both values, so the answer degrades to kUnknown.
  bool all_indicator = true;
  for (const CircuitNode& n : c.nodes)
    if (n.kind == NodeKind::kLeaf && !is_indicator(n)) {
      all_indicator = false;
      break;
    }
  if (!all_indicator) {
    report.deterministic = Tristate::kUnknown;
    return report;
  }

  const std::size_t vars = static_cast<std::size_t>(c.var_count);
  std::vector<std::array<VarSet, 2>> can(c.nodes.size());
  for (std::uint32_t id = 0; id < c.nodes.size(); ++id) {
    const CircuitNode& n = c.nodes[id];
    can[id] = {VarSet(vars), VarSet(vars)};
    if (n.kind == NodeKind::kLeaf) {
      can[id][n.log_p[1] == 0.0 ? 1 : 0].set(static_cast<std::size_t>(n.var));
    } else {
      for (std::uint32_t child : c.children_of(id)) {
        can[id][0] |= can[child][0];
        can[id][1] |= can[child][1];
      }
    }
  }
  Tristate det = Tristate::kYes;
  for (std::uint32_t id = 0; id < c.nodes.size() && det == Tristate::kYes; ++id) {
    const CircuitNode& n = c.nodes[id];
    if (n.kind != NodeKind::kSum) continue;
    const auto children = c.children_of(id);
    for (std::size_t a = 0; a < children.size() && det == Tristate::kYes; ++a) {
      for (std::size_t b = a + 1; b < children.size(); ++b) {
        // conflict holds the variables on which both children admit a common
        // value; a provably disjoint pair leaves some scope variable out.
        VarSet conflict0 = can[children[a]][0];
        conflict0 &= can[children[b]][0];
        VarSet conflict1 = can[children[a]][1];
        conflict1 &= can[children[b]][1];
        conflict0 |= conflict1;
        if (conflict0.contains(scopes[id])) {
          det = Tristate::kUnknown;
          report.determinism_unknown_at = id;
          break;
        }
      }
    }
  }
  report.deterministic = det;
  return report;
}

}  // namespace circlet
