#include "circlet/clt.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "circlet/errors.hpp"

namespace circlet {

void Clt::rebuild_derived() {
  children.assign(static_cast<std::size_t>(var_count), {});
  for (std::int32_t i = 0; i < var_count; ++i) {
    const std::int32_t p = parent[static_cast<std::size_t>(i)];
    if (p >= 0) children[static_cast<std::size_t>(p)].push_back(i);
  }
  for (auto& kids : children) std::sort(kids.begin(), kids.end());

  topo_order.clear();
  topo_order.reserve(static_cast<std::size_t>(var_count));
  std::queue<std::int32_t> frontier;
  frontier.push(root);
  while (!frontier.empty() && topo_order.size() < static_cast<std::size_t>(var_count)) {
    const std::int32_t v = frontier.front();
    frontier.pop();
    topo_order.push_back(v);
    for (std::int32_t c : children[static_cast<std::size_t>(v)]) frontier.push(c);
  }
}

void check_clt(const Clt& model) {
  const auto vars = static_cast<std::size_t>(model.var_count);
  if (vars == 0) throw InvariantViolation(0, "model has no variables");
  if (model.parent.size() != vars || model.log_factors.size() != vars ||
      model.topo_order.size() != vars)
    throw InvariantViolation(0, "field lengths disagree with var_count");
  if (model.root < 0 || model.root >= model.var_count)
    throw InvariantViolation(0, "root index out of range");

  std::size_t none_count = 0;
  for (std::size_t i = 0; i < vars; ++i) {
    const std::int32_t p = model.parent[i];
    if (p == -1) {
      ++none_count;
      if (static_cast<std::int32_t>(i) != model.root)
        throw InvariantViolation(static_cast<std::uint32_t>(i), "non-root variable has no parent");
    } else if (p < 0 || p >= model.var_count) {
      throw InvariantViolation(static_cast<std::uint32_t>(i), "parent index out of range");
    }
  }
  if (none_count != 1) throw InvariantViolation(0, "expected exactly one root");

  // Parents must precede children in topo_order, each variable once.
  std::vector<std::int32_t> position(vars, -1);
  for (std::size_t k = 0; k < vars; ++k) {
    const std::int32_t v = model.topo_order[k];
    if (v < 0 || v >= model.var_count || position[static_cast<std::size_t>(v)] != -1)
      throw InvariantViolation(static_cast<std::uint32_t>(k), "topo_order is not a permutation");
    position[static_cast<std::size_t>(v)] = static_cast<std::int32_t>(k);
  }
  if (model.topo_order[0] != model.root)
    throw InvariantViolation(0, "topo_order does not start at the root");
  for (std::size_t i = 0; i < vars; ++i) {
    const std::int32_t p = model.parent[i];
    if (p >= 0 && position[static_cast<std::size_t>(p)] >= position[i])
      throw InvariantViolation(static_cast<std::uint32_t>(i), "parent after child in topo_order");
  }
  // A parent array with one root and a consistent topo order is a tree:
  // every node reaches the root through strictly earlier positions.

  for (std::size_t i = 0; i < vars; ++i) {
    const int srange = model.parent[i] == -1 ? 1 : 2;
    for (int s = 0; s < srange; ++s) {
      const double total =
          std::exp(model.log_factors[i][s][0]) + std::exp(model.log_factors[i][s][1]);
      if (std::abs(total - 1.0) > 1e-9)
        throw InvariantViolation(static_cast<std::uint32_t>(i),
                                 "conditional column does not normalize");
    }
  }
}

MiTable mutual_information(const PairCounts& counts, const SmoothingSpec& smoothing) {
  const std::size_t vars = counts.var_count();
  const double alpha = smoothing.alpha;
  const double total = static_cast<double>(counts.n()) + 4.0 * alpha;
  MiTable mi(vars);
  for (std::size_t i = 0; i < vars; ++i) {
    for (std::size_t j = i; j < vars; ++j) {
      double joint[2][2];
      double pi[2] = {0.0, 0.0};
      double pj[2] = {0.0, 0.0};
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const double p = (static_cast<double>(counts.count(i, j, a, b)) + alpha) / total;
          joint[a][b] = p;
          pi[a] += p;
          pj[b] += p;
        }
      double value = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          if (joint[a][b] > 0.0)
            value += joint[a][b] * std::log(joint[a][b] / (pi[a] * pj[b]));
      value = std::max(0.0, value);  // clamp -1e-17-style rounding
      mi.at(i, j) = value;
      mi.at(j, i) = value;
    }
  }
  return mi;
}

std::vector<std::int32_t> max_spanning_tree(const MiTable& mi, std::int32_t root) {
  const auto vars = static_cast<std::size_t>(mi.var_count());
  std::vector<std::int32_t> parent(vars, -1);
  if (vars <= 1) return parent;

  std::vector<char> in_tree(vars, 0);
  std::vector<double> best_w(vars, 0.0);
  std::vector<std::int32_t> best_u(vars, root);
  const auto uroot = static_cast<std::size_t>(root);
  in_tree[uroot] = 1;
  for (std::size_t v = 0; v < vars; ++v)
    if (v != uroot) best_w[v] = mi(uroot, v);

  for (std::size_t step = 1; step < vars; ++step) {
    std::size_t pick = vars;
    for (std::size_t v = 0; v < vars; ++v) {
      if (in_tree[v]) continue;
      if (pick == vars || best_w[v] > best_w[pick] ||
          (best_w[v] == best_w[pick] &&
           (best_u[v] < best_u[pick] ||
            (best_u[v] == best_u[pick] && v < pick))))
        pick = v;
    }
    parent[pick] = best_u[pick];
    in_tree[pick] = 1;
    for (std::size_t v = 0; v < vars; ++v) {
      if (in_tree[v]) continue;
      const double w = mi(pick, v);
      if (w > best_w[v] ||
          (w == best_w[v] && static_cast<std::int32_t>(pick) < best_u[v])) {
        best_w[v] = w;
        best_u[v] = static_cast<std::int32_t>(pick);
      }
    }
  }
  return parent;
}

Clt fit_clt(const BitMatrix& data, const SmoothingSpec& smoothing,
            std::optional<std::int32_t> root, unsigned jobs) {
  const auto vars = static_cast<std::int32_t>(data.cols());
  const std::int32_t r = root.value_or(0);
  if (vars < 1) throw ModelError("dataset has no variables");
  if (r < 0 || r >= vars) throw ModelError("root index out of range");
  if (smoothing.alpha < 0.0) throw ModelError("alpha must be >= 0");

  const PairCounts counts = pairwise_counts(data, jobs);
  const double alpha = smoothing.alpha;
  const auto n = static_cast<double>(counts.n());

  Clt model;
  model.var_count = vars;
  model.root = r;
  if (vars > 1) {
    const MiTable mi = mutual_information(counts, smoothing);
    model.parent = max_spanning_tree(mi, r);
  } else {
    model.parent.assign(1, -1);
  }

  model.log_factors.assign(static_cast<std::size_t>(vars), {});
  for (std::int32_t i = 0; i < vars; ++i) {
    auto& table = model.log_factors[static_cast<std::size_t>(i)];
    const std::int32_t p = model.parent[static_cast<std::size_t>(i)];
    if (p == -1) {
      const auto n1 = static_cast<double>(counts.ones(static_cast<std::size_t>(i)));
      const double denom = std::log(n + 2.0 * alpha);
      table[0][0] = table[1][0] = std::log(n - n1 + alpha) - denom;
      table[0][1] = table[1][1] = std::log(n1 + alpha) - denom;
    } else {
      for (int s = 0; s < 2; ++s) {
        const auto ns = static_cast<double>(
            counts.count(static_cast<std::size_t>(p), static_cast<std::size_t>(p), s, s));
        if (alpha == 0.0 && ns == 0.0) throw DegenerateTable(i, p, s);
        const double denom = std::log(ns + 2.0 * alpha);
        for (int v = 0; v < 2; ++v) {
          const auto nvs = static_cast<double>(
              counts.count(static_cast<std::size_t>(i), static_cast<std::size_t>(p), v, s));
          table[s][v] = std::log(nvs + alpha) - denom;
        }
      }
    }
  }

  model.rebuild_derived();
  return model;
}

}  // namespace circlet
