#include "circlet/oracle.hpp"

#include <cmath>

#include "circlet/errors.hpp"

namespace circlet {

namespace {

constexpr std::size_t kMaxVars = 20;

std::size_t checked_var_count(std::size_t vars) {
  if (vars > kMaxVars) throw TooManyVariables(vars);
  return vars;
}

bool consistent(std::uint64_t assignment, std::span<const Cell> row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    const int bit = (assignment >> i) & 1;
    if (row[i] == Cell::kObs0 && bit) return false;
    if (row[i] == Cell::kObs1 && !bit) return false;
  }
  return true;
}

// x_0-major comparison, so "smaller" means the completion whose first
// differing variable takes value 0.
bool lex_less(std::uint64_t a, std::uint64_t b, std::size_t vars) {
  for (std::size_t i = 0; i < vars; ++i) {
    const int xa = (a >> i) & 1;
    const int xb = (b >> i) & 1;
    if (xa != xb) return xa < xb;
  }
  return false;
}

std::vector<std::uint8_t> unpack(std::uint64_t assignment, std::size_t vars) {
  std::vector<std::uint8_t> bits(vars);
  for (std::size_t i = 0; i < vars; ++i) bits[i] = (assignment >> i) & 1;
  return bits;
}

// Probability of one assignment straight from the factorization.
long double clt_point_probability(const Clt& model, std::uint64_t assignment) {
  long double p = 1.0L;
  for (std::int32_t i = 0; i < model.var_count; ++i) {
    const std::int32_t par = model.parent[static_cast<std::size_t>(i)];
    const int s = par == -1 ? 0 : static_cast<int>((assignment >> par) & 1);
    const int v = (assignment >> i) & 1;
    p *= std::exp(static_cast<long double>(model.log_factors[static_cast<std::size_t>(i)][s][v]));
  }
  return p;
}

// Recursive evaluation of the circuit definition in probability space.
long double circuit_point_probability(const Circuit& c, std::uint64_t assignment) {
  std::vector<long double> memo(c.nodes.size(), -1.0L);
  struct Eval {
    const Circuit& c;
    std::uint64_t assignment;
    std::vector<long double>& memo;
    long double operator()(std::uint32_t id) const {
      if (memo[id] >= 0.0L) return memo[id];
      const CircuitNode& n = c.nodes[id];
      long double v;
      if (n.kind == NodeKind::kLeaf) {
        const int x = (assignment >> n.var) & 1;
        v = std::exp(static_cast<long double>(n.log_p[x]));
      } else if (n.kind == NodeKind::kProduct) {
        v = 1.0L;
        for (std::uint32_t child : c.children_of(id)) v *= (*this)(child);
      } else {
        v = 0.0L;
        const auto children = c.children_of(id);
        const auto weights = c.weights_of(id);
        for (std::size_t k = 0; k < children.size(); ++k)
          v += std::exp(static_cast<long double>(weights[k])) * (*this)(children[k]);
      }
      memo[id] = v;
      return v;
    }
  };
  return Eval{c, assignment, memo}(c.root);
}

template <typename PointFn>
std::vector<double> table_impl(std::size_t vars, PointFn&& point) {
  checked_var_count(vars);
  const std::uint64_t total = std::uint64_t{1} << vars;
  std::vector<double> table(total);
  for (std::uint64_t a = 0; a < total; ++a)
    table[a] = static_cast<double>(std::log(point(a)));
  return table;
}

}  // namespace

std::vector<double> brute_evi_table(const Clt& model) {
  return table_impl(static_cast<std::size_t>(model.var_count),
                    [&](std::uint64_t a) { return clt_point_probability(model, a); });
}

std::vector<double> brute_evi_table(const Circuit& c) {
  return table_impl(static_cast<std::size_t>(c.var_count),
                    [&](std::uint64_t a) { return circuit_point_probability(c, a); });
}

double brute_mar_from_table(std::span<const double> table, std::span<const Cell> row) {
  checked_var_count(row.size());
  long double total = 0.0L;
  for (std::uint64_t a = 0; a < table.size(); ++a)
    if (consistent(a, row)) total += std::exp(static_cast<long double>(table[a]));
  return static_cast<double>(std::log(total));
}

BruteMpe brute_mpe_from_table(std::span<const double> table, std::span<const Cell> row) {
  const std::size_t vars = checked_var_count(row.size());
  double best = -std::numeric_limits<double>::infinity();
  std::uint64_t best_a = 0;
  bool first = true;
  for (std::uint64_t a = 0; a < table.size(); ++a) {
    if (!consistent(a, row)) continue;
    if (first || table[a] > best || (table[a] == best && lex_less(a, best_a, vars))) {
      best = table[a];
      best_a = a;
      first = false;
    }
  }
  return {unpack(best_a, vars), best};
}

double brute_mar(const Clt& model, std::span<const Cell> row) {
  return brute_mar_from_table(brute_evi_table(model), row);
}

double brute_mar(const Circuit& c, std::span<const Cell> row) {
  return brute_mar_from_table(brute_evi_table(c), row);
}

BruteMpe brute_mpe(const Clt& model, std::span<const Cell> row) {
  return brute_mpe_from_table(brute_evi_table(model), row);
}

BruteMpe brute_mpe(const Circuit& c, std::span<const Cell> row) {
  return brute_mpe_from_table(brute_evi_table(c), row);
}

}  // namespace circlet
