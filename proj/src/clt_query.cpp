#include <cmath>
#include <cstring>

#include "circlet/clt.hpp"
#include "circlet/errors.hpp"
#include "circlet/parallel.hpp"
#include "circlet/rng.hpp"

namespace circlet {

namespace {

void check_batch_cols(const Clt& model, std::size_t cols) {
  if (cols != static_cast<std::size_t>(model.var_count))
    throw DimensionMismatch(static_cast<std::size_t>(model.var_count), cols);
}

template <typename Real>
Real row_evi(const Clt& model, const BitMatrix& batch, std::size_t r) {
  Real acc = 0;
  for (std::int32_t i = 0; i < model.var_count; ++i) {
    const std::int32_t p = model.parent[static_cast<std::size_t>(i)];
    const int s = p == -1 ? 0 : batch.get(r, static_cast<std::size_t>(p));
    const int v = batch.get(r, static_cast<std::size_t>(i));
    acc += static_cast<Real>(model.log_factors[static_cast<std::size_t>(i)][s][v]);
  }
  return acc;
}

template <typename Real>
std::vector<double> evi_impl(const Clt& model, const BitMatrix& batch, unsigned jobs) {
  std::vector<double> out(batch.rows());
  parallel_for(batch.rows(), jobs, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t r = begin; r < end; ++r) out[r] = row_evi<Real>(model, batch, r);
  });
  return out;
}

// Upward pass shared by MAR (logsumexp) and MPE (max + argmax). msg holds
// m_i(s) for both parent states; kid_sum[v] accumulates children messages.
template <typename Real, bool kMaxProduct>
Real upward_pass(const Clt& model, const MaskedBatch& batch, std::size_t r, Real* msg,
                 std::uint8_t* choice) {
  const auto& order = model.topo_order;
  for (std::size_t k = order.size(); k-- > 1;) {  // skip the root at k = 0
    const auto i = static_cast<std::size_t>(order[k]);
    const Cell cell = batch.at(r, i);
    Real kid_sum[2] = {0, 0};
    for (std::int32_t c : model.children[i]) {
      kid_sum[0] += msg[2 * static_cast<std::size_t>(c)];
      kid_sum[1] += msg[2 * static_cast<std::size_t>(c) + 1];
    }
    for (int s = 0; s < 2; ++s) {
      const auto& column = model.log_factors[i][s];
      const Real v0 = static_cast<Real>(column[0]) + kid_sum[0];
      const Real v1 = static_cast<Real>(column[1]) + kid_sum[1];
      Real value;
      int pick = 0;
      if (cell == Cell::kMarg) {
        if constexpr (kMaxProduct) {
          pick = v1 > v0;
          value = pick ? v1 : v0;
        } else {
          value = log_add(v0, v1);
        }
      } else {
        pick = cell == Cell::kObs1;
        value = pick ? v1 : v0;
      }
      msg[2 * i + s] = value;
      if constexpr (kMaxProduct) choice[2 * i + s] = static_cast<std::uint8_t>(pick);
    }
  }

  const auto root = static_cast<std::size_t>(model.root);
  const Cell cell = batch.at(r, root);
  Real kid_sum[2] = {0, 0};
  for (std::int32_t c : model.children[root]) {
    kid_sum[0] += msg[2 * static_cast<std::size_t>(c)];
    kid_sum[1] += msg[2 * static_cast<std::size_t>(c) + 1];
  }
  const Real v0 = static_cast<Real>(model.prior(0)) + kid_sum[0];
  const Real v1 = static_cast<Real>(model.prior(1)) + kid_sum[1];
  Real value;
  int pick;
  if (cell == Cell::kMarg) {
    if constexpr (kMaxProduct) {
      pick = v1 > v0;
      value = pick ? v1 : v0;
    } else {
      return log_add(v0, v1);
    }
  } else {
    pick = cell == Cell::kObs1;
    value = pick ? v1 : v0;
  }
  if constexpr (kMaxProduct) {
    choice[2 * root] = choice[2 * root + 1] = static_cast<std::uint8_t>(pick);
  }
  return value;
}

template <typename Real>
std::vector<double> mar_impl(const Clt& model, const MaskedBatch& batch, unsigned jobs) {
  const auto vars = static_cast<std::size_t>(model.var_count);
  std::vector<double> out(batch.rows());
  parallel_for(batch.rows(), jobs, [&](std::size_t begin, std::size_t end, unsigned) {
    std::vector<Real> msg(2 * vars);
    for (std::size_t r = begin; r < end; ++r)
      out[r] = upward_pass<Real, false>(model, batch, r, msg.data(), nullptr);
  });
  return out;
}

template <typename Real>
MpeBatch mpe_impl(const Clt& model, const MaskedBatch& batch, unsigned jobs) {
  const auto vars = static_cast<std::size_t>(model.var_count);
  MpeBatch result;
  result.completions = BitMatrix(batch.rows(), vars);
  result.log_values.assign(batch.rows(), 0.0);
  result.exact = true;

  parallel_for(batch.rows(), jobs, [&](std::size_t begin, std::size_t end, unsigned) {
    std::vector<Real> msg(2 * vars);
    std::vector<std::uint8_t> choice(2 * vars);
    for (std::size_t r = begin; r < end; ++r) {
      upward_pass<Real, true>(model, batch, r, msg.data(), choice.data());
      // Root-to-leaf backtrack: each node's choice is indexed by its parent's
      // committed value.
      for (std::int32_t node : model.topo_order) {
        const auto i = static_cast<std::size_t>(node);
        const std::int32_t p = model.parent[i];
        const int s = p == -1 ? 0 : result.completions.get(r, static_cast<std::size_t>(p));
        if (choice[2 * i + static_cast<std::size_t>(s)]) result.completions.set(r, i, true);
      }
      result.log_values[r] = row_evi<Real>(model, result.completions, r);
    }
  });
  return result;
}

}  // namespace

std::vector<double> clt_evi(const Clt& model, const BitMatrix& batch, unsigned jobs,
                            Precision precision) {
  check_batch_cols(model, batch.cols());
  return precision == Precision::kF64 ? evi_impl<double>(model, batch, jobs)
                                      : evi_impl<float>(model, batch, jobs);
}

std::vector<double> clt_mar(const Clt& model, const MaskedBatch& batch, unsigned jobs,
                            Precision precision) {
  check_batch_cols(model, batch.cols());
  return precision == Precision::kF64 ? mar_impl<double>(model, batch, jobs)
                                      : mar_impl<float>(model, batch, jobs);
}

MpeBatch clt_mpe(const Clt& model, const MaskedBatch& batch, unsigned jobs, Precision precision) {
  check_batch_cols(model, batch.cols());
  return precision == Precision::kF64 ? mpe_impl<double>(model, batch, jobs)
                                      : mpe_impl<float>(model, batch, jobs);
}

BitMatrix clt_sample(const Clt& model, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw ModelError("sample count must be >= 1");
  const auto vars = static_cast<std::size_t>(model.var_count);
  BitMatrix out(n, vars);
  for (std::size_t r = 0; r < n; ++r) {
    RowRng rng(seed, r);
    for (std::int32_t node : model.topo_order) {
      const auto i = static_cast<std::size_t>(node);
      const std::int32_t p = model.parent[i];
      const int s = p == -1 ? 0 : out.get(r, static_cast<std::size_t>(p));
      const double p1 = std::exp(model.log_factors[i][s][1]);
      if (rng.next_unit() < p1) out.set(r, i, true);
    }
  }
  return out;
}

}  // namespace circlet
