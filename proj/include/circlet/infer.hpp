#pragma once

#include <cstdint>
#include <vector>

#include "circlet/bitmatrix.hpp"
#include "circlet/circuit.hpp"
#include "circlet/clt.hpp"
#include "circlet/logspace.hpp"
#include "circlet/mask.hpp"

namespace circlet {

enum class QueryKind { kEvi, kMar, kMpe, kConditionalSample };

// Per-row log-likelihood of fully observed rows: one forward arena scan per
// row. Output is order-preserving and bit-identical for every jobs value.
std::vector<double> pc_evi(const Circuit& c, const BitMatrix& batch, unsigned jobs = 1,
                           Precision precision = Precision::kF64);

// Per-row log marginal: the EVI scan with marginalized leaves emitting log 1.
// Exact on smooth decomposable circuits (enforced).
std::vector<double> pc_mar(const Circuit& c, const MaskedBatch& batch, unsigned jobs = 1,
                           Precision precision = Precision::kF64);

// Upward max pass with argmax bookkeeping, then a root-to-leaf trace that
// commits marginalized variables. Exact when the circuit is deterministic
// (result.exact), otherwise the standard max-product lower bound.
MpeBatch pc_mpe(const Circuit& c, const MaskedBatch& batch, unsigned jobs = 1,
                Precision precision = Precision::kF64);

struct SampleBatch {
  BitMatrix completions;
  std::vector<double> log_values;  // EVI of each completion
};

// Exact conditional sampling: an upward marginal pass caches every node value,
// then a top-down pass picks sum branches proportionally and draws
// marginalized leaves. Row randomness is derived from (seed, row), so results
// do not depend on jobs. Throws ZeroEvidenceProbability when a row's evidence
// has zero probability.
SampleBatch pc_conditional_sample(const Circuit& c, const MaskedBatch& batch, std::uint64_t seed,
                                  unsigned jobs = 1, Precision precision = Precision::kF64);

}  // namespace circlet
