#include "circlet/pair_counts.hpp"

#include <bit>

#include "circlet/parallel.hpp"

namespace circlet {

PairCounts pairwise_counts(const BitMatrix& data, unsigned jobs) {
  const std::size_t vars = data.cols();
  const std::size_t words = data.words_per_col();

  std::vector<std::uint32_t> ones(vars);
  for (std::size_t i = 0; i < vars; ++i)
    ones[i] = static_cast<std::uint32_t>(data.column_ones(i));

  std::vector<std::uint32_t> both(vars * vars, 0);
  // Workers own disjoint stripes of i; (i, j) and (j, i) are written by the
  // stripe that owns i <= j, then mirrored afterwards.
  parallel_for(vars, jobs, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t i = begin; i < end; ++i) {
      const std::uint64_t* a = data.column(i).data();
      both[i * vars + i] = ones[i];
      for (std::size_t j = i + 1; j < vars; ++j) {
        const std::uint64_t* b = data.column(j).data();
        std::uint64_t c = 0;
        for (std::size_t w = 0; w < words; ++w) c += std::popcount(a[w] & b[w]);
        both[i * vars + j] = static_cast<std::uint32_t>(c);
      }
    }
  });
  for (std::size_t i = 0; i < vars; ++i)
    for (std::size_t j = i + 1; j < vars; ++j) both[j * vars + i] = both[i * vars + j];

  return PairCounts(data.rows(), vars, std::move(ones), std::move(both));
}

}  // namespace circlet
