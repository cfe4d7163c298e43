#include "circlet/compile.hpp"

#include <array>

#include "circlet/errors.hpp"

namespace circlet {

Circuit compile_clt(const Clt& model) {
  check_clt(model);
  const auto vars = static_cast<std::size_t>(model.var_count);
  CircuitBuilder builder(model.var_count);

  // sum_id[i][s]: the conditional sum of variable i given parent state s.
  std::vector<std::array<std::uint32_t, 2>> sum_id(vars);
  std::uint32_t root_id = 0;

  // Children before parents: sweep the traversal order in reverse so every
  // child's sums exist when its parent's branch products are emitted.
  for (std::size_t k = vars; k-- > 0;) {
    const auto i = static_cast<std::size_t>(model.topo_order[k]);
    const auto& kids = model.children[i];

    std::array<std::uint32_t, 2> branch;
    for (int v = 0; v < 2; ++v) {
      const std::uint32_t ind = builder.indicator(static_cast<std::int32_t>(i), v);
      if (kids.empty()) {
        branch[v] = ind;
      } else {
        std::vector<std::uint32_t> parts;
        parts.reserve(kids.size() + 1);
        parts.push_back(ind);
        for (std::int32_t c : kids) parts.push_back(sum_id[static_cast<std::size_t>(c)][v]);
        branch[v] = builder.product(parts);
      }
    }

    const auto& table = model.log_factors[i];
    if (static_cast<std::int32_t>(i) == model.root) {
      const std::array<double, 2> prior = {table[0][0], table[0][1]};
      root_id = builder.sum(branch, prior);
    } else {
      for (int s = 0; s < 2; ++s) {
        const std::array<double, 2> weights = {table[s][0], table[s][1]};
        sum_id[i][s] = builder.sum(branch, weights);
      }
    }
  }

  return std::move(builder).finish(root_id);
}

}  // namespace circlet
