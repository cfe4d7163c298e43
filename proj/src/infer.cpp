#include "circlet/infer.hpp"

#include <cmath>

#include "circlet/errors.hpp"
#include "circlet/parallel.hpp"
#include "circlet/rng.hpp"

namespace circlet {

namespace {

void check_batch_cols(const Circuit& c, std::size_t cols) {
  if (cols != static_cast<std::size_t>(c.var_count))
    throw DimensionMismatch(static_cast<std::size_t>(c.var_count), cols);
}

void require_smooth_decomposable(const Circuit& c, const char* op) {
  const StructureReport report = validate(c);
  if (!report.smooth || !report.decomposable)
    throw ModelError(std::string(op) + " requires a smooth and decomposable circuit");
}

// Per-worker scratch: one log-value slot per arena node, reused across rows.
template <typename Real>
struct EvalBuffer {
  explicit EvalBuffer(std::size_t arena_size) : values(arena_size) {}
  std::vector<Real> values;
};

template <typename Real>
inline Real neg_inf() {
  return -std::numeric_limits<Real>::infinity();
}

// LeafFn: Real(const CircuitNode&). Forward scan shared by EVI and MAR.
template <typename Real, typename LeafFn>
Real scan_row(const Circuit& c, EvalBuffer<Real>& buffer, LeafFn&& leaf_value) {
  Real* values = buffer.values.data();
  const std::uint32_t count = static_cast<std::uint32_t>(c.nodes.size());
  for (std::uint32_t id = 0; id < count; ++id) {
    const CircuitNode& n = c.nodes[id];
    Real v = 0;
    switch (n.kind) {
      case NodeKind::kLeaf:
        v = leaf_value(n);
        break;
      case NodeKind::kProduct: {
        v = 0;
        const std::uint32_t* child = c.edges.data() + n.edge_begin;
        for (std::uint32_t k = 0; k < n.edge_count; ++k) v += values[child[k]];
        break;
      }
      case NodeKind::kSum: {
        const std::uint32_t* child = c.edges.data() + n.edge_begin;
        const double* weight = c.edge_log_weights.data() + n.edge_begin;
        Real m = neg_inf<Real>();
        for (std::uint32_t k = 0; k < n.edge_count; ++k)
          m = std::max(m, static_cast<Real>(weight[k]) + values[child[k]]);
        if (std::isinf(m)) {
          v = m;
        } else {
          Real s = 0;
          for (std::uint32_t k = 0; k < n.edge_count; ++k)
            s += std::exp(static_cast<Real>(weight[k]) + values[child[k]] - m);
          v = m + std::log(s);
        }
        break;
      }
    }
    values[id] = v;
  }
  return values[c.root];
}

template <typename Real>
Real evi_row(const Circuit& c, EvalBuffer<Real>& buffer, const BitMatrix& batch, std::size_t r) {
  return scan_row<Real>(c, buffer, [&](const CircuitNode& n) {
    return static_cast<Real>(n.log_p[batch.get(r, static_cast<std::size_t>(n.var))]);
  });
}

template <typename Real>
std::vector<double> evi_impl(const Circuit& c, const BitMatrix& batch, unsigned jobs) {
  std::vector<double> out(batch.rows());
  parallel_for(batch.rows(), jobs, [&](std::size_t begin, std::size_t end, unsigned) {
    EvalBuffer<Real> buffer(c.nodes.size());
    for (std::size_t r = begin; r < end; ++r) out[r] = evi_row(c, buffer, batch, r);
  });
  return out;
}

template <typename Real>
Real mar_row(const Circuit& c, EvalBuffer<Real>& buffer, const MaskedBatch& batch, std::size_t r) {
  return scan_row<Real>(c, buffer, [&](const CircuitNode& n) -> Real {
    const Cell cell = batch.at(r, static_cast<std::size_t>(n.var));
    if (cell == Cell::kMarg) return 0;
    return static_cast<Real>(n.log_p[static_cast<int>(cell)]);
  });
}

template <typename Real>
std::vector<double> mar_impl(const Circuit& c, const MaskedBatch& batch, unsigned jobs) {
  std::vector<double> out(batch.rows());
  parallel_for(batch.rows(), jobs, [&](std::size_t begin, std::size_t end, unsigned) {
    EvalBuffer<Real> buffer(c.nodes.size());
    for (std::size_t r = begin; r < end; ++r) out[r] = mar_row(c, buffer, batch, r);
  });
  return out;
}

// Upward max pass; records the argmax child of every sum. Ties pick the lower
// child index.
template <typename Real>
void max_pass(const Circuit& c, const MaskedBatch& batch, std::size_t r,
              EvalBuffer<Real>& buffer, std::vector<std::uint32_t>& argmax) {
  Real* values = buffer.values.data();
  for (std::uint32_t id = 0; id < c.nodes.size(); ++id) {
    const CircuitNode& n = c.nodes[id];
    switch (n.kind) {
      case NodeKind::kLeaf: {
        const Cell cell = batch.at(r, static_cast<std::size_t>(n.var));
        if (cell == Cell::kMarg)
          values[id] = static_cast<Real>(
              n.log_p[1] > n.log_p[0] ? n.log_p[1] : n.log_p[0]);
        else
          values[id] = static_cast<Real>(n.log_p[static_cast<int>(cell)]);
        break;
      }
      case NodeKind::kProduct: {
        Real v = 0;
        for (std::uint32_t child : c.children_of(id)) v += values[child];
        values[id] = v;
        break;
      }
      case NodeKind::kSum: {
        const std::uint32_t* child = c.edges.data() + n.edge_begin;
        const double* weight = c.edge_log_weights.data() + n.edge_begin;
        Real best = neg_inf<Real>();
        std::uint32_t best_k = 0;
        for (std::uint32_t k = 0; k < n.edge_count; ++k) {
          const Real v = static_cast<Real>(weight[k]) + values[child[k]];
          if (v > best) {
            best = v;
            best_k = k;
          }
        }
        values[id] = best;
        argmax[id] = best_k;
        break;
      }
    }
  }
}

// Top-down trace: sums descend their argmax child, products descend all
// children, marginalized leaves commit their best value.
template <typename Real>
void trace_max(const Circuit& c, const MaskedBatch& batch, std::size_t r,
               const std::vector<std::uint32_t>& argmax, std::vector<std::uint32_t>& stack,
               BitMatrix& completions) {
  stack.clear();
  stack.push_back(c.root);
  while (!stack.empty()) {
    const std::uint32_t id = stack.back();
    stack.pop_back();
    const CircuitNode& n = c.nodes[id];
    if (n.kind == NodeKind::kLeaf) {
      const auto var = static_cast<std::size_t>(n.var);
      if (batch.at(r, var) == Cell::kMarg && n.log_p[1] > n.log_p[0])
        completions.set(r, var, true);
      continue;
    }
    if (n.kind == NodeKind::kSum) {
      stack.push_back(c.children_of(id)[argmax[id]]);
    } else {
      for (std::uint32_t child : c.children_of(id)) stack.push_back(child);
    }
  }
}

template <typename Real>
MpeBatch mpe_impl(const Circuit& c, const MaskedBatch& batch, unsigned jobs, bool exact) {
  MpeBatch result;
  result.completions = BitMatrix(batch.rows(), static_cast<std::size_t>(c.var_count));
  result.log_values.assign(batch.rows(), 0.0);
  result.exact = exact;

  parallel_for(batch.rows(), jobs, [&](std::size_t begin, std::size_t end, unsigned) {
    EvalBuffer<Real> buffer(c.nodes.size());
    std::vector<std::uint32_t> argmax(c.nodes.size(), 0);
    std::vector<std::uint32_t> stack;
    for (std::size_t r = begin; r < end; ++r) {
      // Observed cells pass straight into the completion.
      for (std::size_t v = 0; v < batch.cols(); ++v)
        if (batch.at(r, v) == Cell::kObs1) result.completions.set(r, v, true);
      max_pass(c, batch, r, buffer, argmax);
      const Real best = buffer.values[c.root];
      if (std::isinf(best) && best < 0) throw ZeroEvidenceProbability(r);
      trace_max<Real>(c, batch, r, argmax, stack, result.completions);
      result.log_values[r] = evi_row(c, buffer, result.completions, r);
    }
  });
  return result;
}

template <typename Real>
SampleBatch sample_impl(const Circuit& c, const MaskedBatch& batch, std::uint64_t seed,
                        unsigned jobs) {
  SampleBatch result;
  result.completions = BitMatrix(batch.rows(), static_cast<std::size_t>(c.var_count));
  result.log_values.assign(batch.rows(), 0.0);

  parallel_for(batch.rows(), jobs, [&](std::size_t begin, std::size_t end, unsigned) {
    EvalBuffer<Real> buffer(c.nodes.size());
    std::vector<std::uint32_t> stack;
    for (std::size_t r = begin; r < end; ++r) {
      for (std::size_t v = 0; v < batch.cols(); ++v)
        if (batch.at(r, v) == Cell::kObs1) result.completions.set(r, v, true);

      const Real root_value = mar_row(c, buffer, batch, r);
      if (std::isinf(root_value) && root_value < 0) throw ZeroEvidenceProbability(r);
      const Real* values = buffer.values.data();

      RowRng rng(seed, r);
      stack.clear();
      stack.push_back(c.root);
      while (!stack.empty()) {
        const std::uint32_t id = stack.back();
        stack.pop_back();
        const CircuitNode& n = c.nodes[id];
        if (n.kind == NodeKind::kLeaf) {
          const auto var = static_cast<std::size_t>(n.var);
          if (batch.at(r, var) != Cell::kMarg) continue;
          // Draw from the leaf's own distribution; indicators force their
          // value because the other side carries zero mass.
          const Real p1 = std::exp(static_cast<Real>(n.log_p[1]) -
                                   log_add(static_cast<Real>(n.log_p[0]),
                                           static_cast<Real>(n.log_p[1])));
          if (static_cast<Real>(rng.next_unit()) < p1) result.completions.set(r, var, true);
          continue;
        }
        if (n.kind == NodeKind::kProduct) {
          for (std::uint32_t child : c.children_of(id)) stack.push_back(child);
          continue;
        }
        // Sum: child k with probability exp(w_k + value_k - value_sum).
        const std::uint32_t* child = c.edges.data() + n.edge_begin;
        const double* weight = c.edge_log_weights.data() + n.edge_begin;
        const Real total = values[id];
        const Real u = static_cast<Real>(rng.next_unit());
        Real cum = 0;
        std::uint32_t picked = 0;
        for (std::uint32_t k = 0; k < n.edge_count; ++k) {
          const Real mass = std::exp(static_cast<Real>(weight[k]) + values[child[k]] - total);
          if (mass <= 0) continue;
          picked = k;  // last positive-mass child absorbs rounding leftovers
          cum += mass;
          if (u < cum) break;
        }
        stack.push_back(child[picked]);
      }
      result.log_values[r] = evi_row(c, buffer, result.completions, r);
    }
  });
  return result;
}

}  // namespace

std::vector<double> pc_evi(const Circuit& c, const BitMatrix& batch, unsigned jobs,
                           Precision precision) {
  check_batch_cols(c, batch.cols());
  return precision == Precision::kF64 ? evi_impl<double>(c, batch, jobs)
                                      : evi_impl<float>(c, batch, jobs);
}

std::vector<double> pc_mar(const Circuit& c, const MaskedBatch& batch, unsigned jobs,
                           Precision precision) {
  check_batch_cols(c, batch.cols());
  require_smooth_decomposable(c, "pc_mar");
  return precision == Precision::kF64 ? mar_impl<double>(c, batch, jobs)
                                      : mar_impl<float>(c, batch, jobs);
}

MpeBatch pc_mpe(const Circuit& c, const MaskedBatch& batch, unsigned jobs, Precision precision) {
  check_batch_cols(c, batch.cols());
  const StructureReport report = validate(c);
  if (!report.smooth || !report.decomposable)
    throw ModelError("pc_mpe requires a smooth and decomposable circuit");
  const bool exact = report.deterministic == Tristate::kYes;
  return precision == Precision::kF64 ? mpe_impl<double>(c, batch, jobs, exact)
                                      : mpe_impl<float>(c, batch, jobs, exact);
}

SampleBatch pc_conditional_sample(const Circuit& c, const MaskedBatch& batch, std::uint64_t seed,
                                  unsigned jobs, Precision precision) {
  check_batch_cols(c, batch.cols());
  require_smooth_decomposable(c, "pc_conditional_sample");
  return precision == Precision::kF64 ? sample_impl<double>(c, batch, seed, jobs)
                                      : sample_impl<float>(c, batch, seed, jobs);
}

}  // namespace circlet
