#include "circlet/mask.hpp"

#include "circlet/errors.hpp"
#include "circlet/rng.hpp"

namespace circlet {

MaskedBatch MaskedBatch::from_data(const BitMatrix& data) {
  MaskedBatch batch(data.rows(), data.cols());
  for (std::size_t r = 0; r < data.rows(); ++r)
    for (std::size_t c = 0; c < data.cols(); ++c)
      batch.set(r, c, data.get(r, c) ? Cell::kObs1 : Cell::kObs0);
  return batch;
}

std::size_t MaskedBatch::marg_count() const {
  std::size_t total = 0;
  for (Cell c : cells_) total += (c == Cell::kMarg);
  return total;
}

BitMatrix MaskedBatch::to_bitmatrix() const {
  BitMatrix data(rows_, cols_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) {
      const Cell v = at(r, c);
      if (v == Cell::kMarg)
        throw ModelError("cannot convert a batch with marginalized cells to a bit matrix");
      if (v == Cell::kObs1) data.set(r, c, true);
    }
  return data;
}

MaskedBatch gen_mask(const BitMatrix& data, const MaskSpec& spec) {
  if (!(spec.p >= 0.0 && spec.p <= 1.0))
    throw ModelError("marginalization probability must lie in [0, 1]");
  MaskedBatch batch(data.rows(), data.cols());
  for (std::size_t r = 0; r < data.rows(); ++r)
    for (std::size_t c = 0; c < data.cols(); ++c) {
      if (to_unit(counter_hash(spec.seed, r, c)) < spec.p)
        batch.set(r, c, Cell::kMarg);
      else
        batch.set(r, c, data.get(r, c) ? Cell::kObs1 : Cell::kObs0);
    }
  return batch;
}

}  // namespace circlet
