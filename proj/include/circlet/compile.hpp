#pragma once

#include "circlet/circuit.hpp"
#include "circlet/clt.hpp"

namespace circlet {

// Compiles a tree model into an equivalent smooth, decomposable, deterministic
// circuit. For each tree node i and value v there is one shared branch unit
// (indicator of x_i = v times the children's conditional sums); each non-root
// node contributes one sum per parent state, weighted by its conditional
// column, and the root contributes a single prior-weighted sum. Unit counts:
// sums = 2(V-1)+1, indicator leaves = 2V, products = 2 * internal tree nodes.
Circuit compile_clt(const Clt& model);

}  // namespace circlet
