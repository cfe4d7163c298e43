#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "circlet/clt.hpp"
#include "circlet/errors.hpp"
#include "circlet/logspace.hpp"
#include "circlet/oracle.hpp"
#include "circlet/rng.hpp"

using namespace circlet;

namespace {

BitMatrix from_rows(const std::vector<std::vector<int>>& rows) {
  BitMatrix m(rows.size(), rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      if (rows[r][c]) m.set(r, c, true);
  return m;
}

BitMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  BitMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      if (counter_hash(seed, r, c) & 1) m.set(r, c, true);
  return m;
}

// All 2^V assignments as a batch; row a sets x_i = bit i of a.
BitMatrix all_assignments(std::size_t vars) {
  BitMatrix m(std::size_t{1} << vars, vars);
  for (std::size_t a = 0; a < m.rows(); ++a)
    for (std::size_t i = 0; i < vars; ++i)
      if ((a >> i) & 1) m.set(a, i, true);
  return m;
}

MaskedBatch random_mask_of(const BitMatrix& data, double p, std::uint64_t seed) {
  return gen_mask(data, {p, seed});
}

std::vector<Cell> mask_row(const MaskedBatch& batch, std::size_t r) {
  std::vector<Cell> row(batch.cols());
  for (std::size_t c = 0; c < batch.cols(); ++c) row[c] = batch.at(r, c);
  return row;
}

}  // namespace

TEST_CASE("mutual information of an independent pair is zero") {
  const auto data = from_rows({{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  const MiTable mi = mutual_information(pairwise_counts(data), {0.0});
  CHECK(mi(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("mutual information of a perfectly correlated pair is ln 2") {
  const auto data = from_rows({{0, 0}, {0, 0}, {1, 1}, {1, 1}});
  const MiTable mi = mutual_information(pairwise_counts(data), {0.0});
  CHECK(mi(0, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("mutual information matches the smoothed four-term sum") {
  // rows {(0,0),(0,1),(1,1)}, alpha = 0.01, evaluated by hand
  const auto data = from_rows({{0, 0}, {0, 1}, {1, 1}});
  const MiTable mi = mutual_information(pairwise_counts(data), {0.01});
  CHECK(mi(0, 1) == doctest::Approx(0.15895833608656243).epsilon(1e-12));
}

TEST_CASE("mutual information invariants on random data") {
  const BitMatrix data = random_matrix(50, 6, 11);
  const PairCounts counts = pairwise_counts(data);
  for (double alpha : {0.0, 0.01, 1.0}) {
    const MiTable mi = mutual_information(counts, {alpha});
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 6; ++j) {
        CHECK(mi(i, j) == mi(j, i));
        CHECK(mi(i, j) >= 0.0);
      }
  }
  // Unsmoothed diagonal equals the empirical column entropy.
  const MiTable mi = mutual_information(counts, {0.0});
  for (std::size_t i = 0; i < 6; ++i) {
    const double p1 = static_cast<double>(counts.ones(i)) / static_cast<double>(counts.n());
    double entropy = 0.0;
    if (p1 > 0) entropy -= p1 * std::log(p1);
    if (p1 < 1) entropy -= (1 - p1) * std::log(1 - p1);
    CHECK(mi(i, i) == doctest::Approx(entropy).epsilon(1e-12));
  }
}

TEST_CASE("fit_clt on one variable stores the frequency prior") {
  const auto data = from_rows({{1}, {1}, {0}, {1}});
  const Clt model = fit_clt(data, {0.0});
  CHECK(model.var_count == 1);
  CHECK(model.parent[0] == -1);
  CHECK(model.prior(0) == doctest::Approx(std::log(0.25)).epsilon(1e-12));
  CHECK(model.prior(1) == doctest::Approx(std::log(0.75)).epsilon(1e-12));
}

TEST_CASE("fit_clt picks the maximum-MI spanning tree of K3") {
  // Exhaustive enumeration of the 3 spanning trees says {0-1, 1-2} wins.
  const auto data = from_rows({{0, 0, 0}, {0, 1, 1}, {1, 1, 1}, {1, 1, 0}});
  const Clt model = fit_clt(data, {0.01});
  CHECK(model.root == 0);
  CHECK(model.parent[0] == -1);
  CHECK(model.parent[1] == 0);
  CHECK(model.parent[2] == 1);
}

TEST_CASE("max_spanning_tree matches a naive candidate scan, ties included") {
  // Naive rule: scan every (in-tree i, outside j) pair in ascending (i, j)
  // order, keep the first maximum. Weights from a tiny value set force ties.
  auto naive = [](const MiTable& w, std::int32_t root) {
    const std::size_t vars = w.var_count();
    std::vector<std::int32_t> parent(vars, -1);
    std::vector<char> in_tree(vars, 0);
    in_tree[static_cast<std::size_t>(root)] = 1;
    for (std::size_t step = 1; step < vars; ++step) {
      double best = -1.0;
      std::size_t best_i = 0, best_j = 0;
      for (std::size_t i = 0; i < vars; ++i) {
        if (!in_tree[i]) continue;
        for (std::size_t j = 0; j < vars; ++j) {
          if (in_tree[j]) continue;
          if (w(i, j) > best) {
            best = w(i, j);
            best_i = i;
            best_j = j;
          }
        }
      }
      parent[best_j] = static_cast<std::int32_t>(best_i);
      in_tree[best_j] = 1;
    }
    return parent;
  };
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const std::size_t vars = 2 + counter_hash(seed, 1, 1) % 9;
    MiTable w(vars);
    for (std::size_t i = 0; i < vars; ++i)
      for (std::size_t j = i + 1; j < vars; ++j) {
        const double v = static_cast<double>(counter_hash(seed, i, j) % 4) / 4.0;
        w.at(i, j) = v;
        w.at(j, i) = v;
      }
    const auto root = static_cast<std::int32_t>(counter_hash(seed, 2, 2) % vars);
    CHECK(max_spanning_tree(w, root) == naive(w, root));
  }
}

TEST_CASE("fit_clt is deterministic and jobs-invariant") {
  const BitMatrix data = random_matrix(80, 9, 31);
  const Clt a = fit_clt(data, {0.01}, std::nullopt, 1);
  const Clt b = fit_clt(data, {0.01}, std::nullopt, 4);
  CHECK(a.parent == b.parent);
  CHECK(a.topo_order == b.topo_order);
  for (std::size_t i = 0; i < a.log_factors.size(); ++i)
    for (int s = 0; s < 2; ++s)
      for (int v = 0; v < 2; ++v)
        CHECK(a.log_factors[i][s][v] == b.log_factors[i][s][v]);
}

TEST_CASE("fit_clt validates its arguments") {
  const BitMatrix data = random_matrix(10, 3, 91);
  CHECK_THROWS_AS(fit_clt(data, {0.01}, 3), ModelError);
  CHECK_THROWS_AS(fit_clt(data, {-0.5}), ModelError);
  CHECK_THROWS_AS(clt_sample(fit_clt(data, {0.01}), 0, 1), ModelError);
}

TEST_CASE("fit_clt reports a degenerate table when alpha is zero") {
  // Column 1 is constant, so conditioning on its unseen state divides 0 by 0
  // whenever variable 1 becomes the parent; with root 1 it always is.
  const auto data = from_rows({{0, 0}, {1, 0}, {0, 0}, {1, 0}});
  CHECK_THROWS_AS(fit_clt(data, {0.0}, 1), DegenerateTable);
}

TEST_CASE("fitted conditionals normalize and the joint sums to one") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const BitMatrix data = random_matrix(64, 8, seed);
    const Clt model = fit_clt(data, {0.01});
    check_clt(model);
    const std::vector<double> lls = clt_evi(model, all_assignments(8));
    CHECK(log_sum_exp<double>(lls) == doctest::Approx(0.0).epsilon(1e-6));
  }
}

TEST_CASE("clt_evi on a single-variable uniform prior") {
  const auto data = from_rows({{0}, {1}});
  const Clt model = fit_clt(data, {0.0});
  BitMatrix one(1, 1);
  one.set(0, 0, true);
  CHECK(clt_evi(model, one)[0] == doctest::Approx(std::log(0.5)).epsilon(1e-12));
}

TEST_CASE("clt_evi equals the direct factor-lookup product") {
  const BitMatrix data = random_matrix(40, 4, 7);
  const Clt model = fit_clt(data, {0.01});
  const BitMatrix batch = random_matrix(16, 4, 8);
  const std::vector<double> lls = clt_evi(model, batch);
  for (std::size_t r = 0; r < batch.rows(); ++r) {
    double expected = 0.0;
    for (std::int32_t i = 0; i < 4; ++i) {
      const std::int32_t p = model.parent[i];
      const int s = p == -1 ? 0 : batch.get(r, p);
      expected += model.log_factors[i][s][batch.get(r, i)];
    }
    CHECK(lls[r] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("clt_evi rejects mismatched batch width") {
  const Clt model = fit_clt(random_matrix(10, 3, 1), {0.01});
  CHECK_THROWS_AS(clt_evi(model, BitMatrix(2, 4)), DimensionMismatch);
}

TEST_CASE("clt_mar: full marginalization gives log 1, none gives EVI") {
  const BitMatrix data = random_matrix(60, 7, 13);
  const Clt model = fit_clt(data, {0.01});
  MaskedBatch all_marg(3, 7);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 7; ++c) all_marg.set(r, c, Cell::kMarg);
  for (double ll : clt_mar(model, all_marg)) CHECK(ll == doctest::Approx(0.0).epsilon(1e-9));

  const BitMatrix batch = random_matrix(5, 7, 14);
  const auto mar = clt_mar(model, MaskedBatch::from_data(batch));
  const auto evi = clt_evi(model, batch);
  for (std::size_t r = 0; r < 5; ++r) CHECK(mar[r] == doctest::Approx(evi[r]).epsilon(1e-12));
}

TEST_CASE("clt_mar matches the brute-force marginal and dominates EVI") {
  const BitMatrix data = random_matrix(64, 6, 19);
  const Clt model = fit_clt(data, {0.01});
  const auto table = brute_evi_table(model);
  const BitMatrix batch = random_matrix(12, 6, 20);
  const MaskedBatch mask = random_mask_of(batch, 0.5, 21);
  const auto mar = clt_mar(model, mask);
  const auto evi = clt_evi(model, batch);
  for (std::size_t r = 0; r < batch.rows(); ++r) {
    CHECK(mar[r] == doctest::Approx(brute_mar_from_table(table, mask_row(mask, r))).epsilon(1e-9));
    CHECK(mar[r] >= evi[r] - 1e-12);
  }
}

TEST_CASE("clt_mpe: no marginalized cells returns the input and its EVI") {
  const BitMatrix data = random_matrix(30, 5, 29);
  const Clt model = fit_clt(data, {0.01});
  const BitMatrix batch = random_matrix(6, 5, 30);
  const MpeBatch result = clt_mpe(model, MaskedBatch::from_data(batch));
  CHECK(result.completions == batch);
  const auto evi = clt_evi(model, batch);
  for (std::size_t r = 0; r < 6; ++r) CHECK(result.log_values[r] == evi[r]);
}

TEST_CASE("clt_mpe maximizes over completions") {
  const BitMatrix data = random_matrix(64, 4, 37);
  const Clt model = fit_clt(data, {0.01});
  // two marginalized cells -> four completions to beat
  MaskedBatch mask = MaskedBatch::from_data(random_matrix(8, 4, 38));
  for (std::size_t r = 0; r < mask.rows(); ++r) {
    mask.set(r, 1, Cell::kMarg);
    mask.set(r, 3, Cell::kMarg);
  }
  const MpeBatch result = clt_mpe(model, mask);
  const auto table = brute_evi_table(model);
  for (std::size_t r = 0; r < mask.rows(); ++r) {
    const BruteMpe expected = brute_mpe_from_table(table, mask_row(mask, r));
    CHECK(result.log_values[r] == doctest::Approx(expected.log_value).epsilon(1e-9));
    // the reported completion attains the reported value and the evidence
    for (std::size_t c = 0; c < 4; ++c) {
      const Cell cell = mask.at(r, c);
      if (cell != Cell::kMarg)
        CHECK(static_cast<int>(result.completions.get(r, c)) == static_cast<int>(cell));
    }
  }
  const auto check_evi = clt_evi(model, result.completions);
  for (std::size_t r = 0; r < mask.rows(); ++r) CHECK(check_evi[r] == result.log_values[r]);
}

TEST_CASE("clt_sample reproduces degenerate and uniform priors") {
  Clt model;
  model.var_count = 1;
  model.root = 0;
  model.parent = {-1};
  model.log_factors.assign(1, {});
  model.log_factors[0][0] = {kNegInf, 0.0};  // P(x = 1) = 1
  model.log_factors[0][1] = {kNegInf, 0.0};
  model.rebuild_derived();
  const BitMatrix ones = clt_sample(model, 500, 5);
  CHECK(ones.column_ones(0) == 500);

  model.log_factors[0][0] = {std::log(0.5), std::log(0.5)};
  model.log_factors[0][1] = model.log_factors[0][0];
  const BitMatrix coin = clt_sample(model, 100000, 6);
  const double fraction = static_cast<double>(coin.column_ones(0)) / 100000.0;
  CHECK(fraction == doctest::Approx(0.5).epsilon(0.02));
  CHECK(clt_sample(model, 100000, 6) == coin);  // same seed, same rows
}

TEST_CASE("clt_sample matches the exact joint in total variation") {
  const BitMatrix data = random_matrix(64, 3, 53);
  const Clt model = fit_clt(data, {0.1});
  const std::size_t n = 200000;
  const BitMatrix samples = clt_sample(model, n, 7);
  std::vector<double> freq(8, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t a = 0;
    for (std::size_t i = 0; i < 3; ++i) a |= static_cast<std::size_t>(samples.get(r, i)) << i;
    freq[a] += 1.0 / static_cast<double>(n);
  }
  const auto table = brute_evi_table(model);
  double tv = 0.0;
  for (std::size_t a = 0; a < 8; ++a) tv += std::abs(freq[a] - std::exp(table[a]));
  CHECK(tv / 2.0 <= 0.01);
}

TEST_CASE("clt serialization round-trips exactly, including -inf factors") {
  const BitMatrix data = random_matrix(64, 6, 61);
  const Clt model = fit_clt(data, {0.0});  // alpha 0 leaves -inf entries behind
  const auto path = std::filesystem::temp_directory_path() / "circlet_model.json";
  save_clt(model, path);
  const Clt loaded = load_clt(path);
  CHECK(loaded.var_count == model.var_count);
  CHECK(loaded.root == model.root);
  CHECK(loaded.parent == model.parent);
  CHECK(loaded.topo_order == model.topo_order);
  for (std::size_t i = 0; i < model.log_factors.size(); ++i)
    for (int s = 0; s < 2; ++s)
      for (int v = 0; v < 2; ++v) {
        const double a = model.log_factors[i][s][v];
        const double b = loaded.log_factors[i][s][v];
        if (std::isinf(a))
          CHECK(std::isinf(b));
        else
          CHECK(a == b);
      }
}

TEST_CASE("clt load rejects version and structure problems") {
  namespace fs = std::filesystem;
  const auto path = fs::temp_directory_path() / "circlet_badmodel.json";
  {
    std::ofstream out(path);
    out << R"({"format_version": 2, "var_count": 1, "root": 0,)"
        << R"( "parents": [null], "log_factors": [[-0.7, -0.7]]})";
  }
  CHECK_THROWS_AS(load_clt(path), FormatVersionMismatch);
  {
    std::ofstream out(path);
    // two-node parent cycle
    out << R"({"format_version": 1, "var_count": 2, "root": 0,)"
        << R"( "parents": [1, 0],)"
        << R"( "log_factors": [[[-0.7, -0.7], [-0.7, -0.7]], [[-0.7, -0.7], [-0.7, -0.7]]]})";
  }
  CHECK_THROWS_AS(load_clt(path), InvariantViolation);
  {
    std::ofstream out(path);
    // prior does not normalize
    out << R"({"format_version": 1, "var_count": 1, "root": 0,)"
        << R"( "parents": [null], "log_factors": [[-0.5, -0.5]]})";
  }
  CHECK_THROWS_AS(load_clt(path), InvariantViolation);
}

TEST_CASE("queries are jobs-invariant bit for bit") {
  const BitMatrix data = random_matrix(200, 10, 67);
  const Clt model = fit_clt(data, {0.01});
  const MaskedBatch mask = random_mask_of(data, 0.5, 68);
  const auto evi1 = clt_evi(model, data, 1);
  const auto mar1 = clt_mar(model, mask, 1);
  const auto mpe1 = clt_mpe(model, mask, 1);
  for (unsigned jobs : {2u, 4u}) {
    CHECK(clt_evi(model, data, jobs) == evi1);
    CHECK(clt_mar(model, mask, jobs) == mar1);
    const auto mpe = clt_mpe(model, mask, jobs);
    CHECK(mpe.log_values == mpe1.log_values);
    CHECK(mpe.completions == mpe1.completions);
  }
}

TEST_CASE("root choice reorients the tree but preserves the joint") {
  // Data sampled from a chain with per-edge strengths keeps the MI matrix
  // tie-free, so both fits recover the same undirected tree.
  Clt source;
  source.var_count = 7;
  source.root = 0;
  source.parent = {-1, 0, 1, 2, 3, 4, 5};
  source.log_factors.assign(7, {});
  for (std::size_t i = 0; i < 7; ++i) {
    const double stay = 0.62 + 0.05 * static_cast<double>(i);
    source.log_factors[i][0] = {std::log(stay), std::log1p(-stay)};
    source.log_factors[i][1] = {std::log1p(-stay), std::log(stay)};
  }
  source.log_factors[0][1] = source.log_factors[0][0];
  source.rebuild_derived();
  const BitMatrix data = clt_sample(source, 4000, 71);

  // alpha = 0: conditional ratios cancel exactly under reorientation, while
  // smoothed ones differ at O(alpha / N).
  const Clt a = fit_clt(data, {0.0}, 0);
  const Clt b = fit_clt(data, {0.0}, 5);
  auto undirected = [](const Clt& m) {
    std::vector<std::pair<std::int32_t, std::int32_t>> edges;
    for (std::int32_t i = 0; i < m.var_count; ++i)
      if (m.parent[i] != -1) edges.emplace_back(std::min(i, m.parent[i]), std::max(i, m.parent[i]));
    std::sort(edges.begin(), edges.end());
    return edges;
  };
  REQUIRE(undirected(a) == undirected(b));

  const BitMatrix batch = all_assignments(7);
  const auto lls_a = clt_evi(a, batch);
  const auto lls_b = clt_evi(b, batch);
  for (std::size_t r = 0; r < batch.rows(); ++r)
    CHECK(lls_a[r] == doctest::Approx(lls_b[r]).epsilon(1e-9));
}

TEST_CASE("32-bit mode tracks 64-bit within 1e-3") {
  const BitMatrix data = random_matrix(64, 9, 73);
  const Clt model = fit_clt(data, {0.01});
  const MaskedBatch mask = random_mask_of(data, 0.5, 74);
  const auto evi64 = clt_evi(model, data, 1, Precision::kF64);
  const auto evi32 = clt_evi(model, data, 1, Precision::kF32);
  const auto mar64 = clt_mar(model, mask, 1, Precision::kF64);
  const auto mar32 = clt_mar(model, mask, 1, Precision::kF32);
  for (std::size_t r = 0; r < data.rows(); ++r) {
    CHECK(std::abs(evi64[r] - evi32[r]) <= 1e-3);
    CHECK(std::abs(mar64[r] - mar32[r]) <= 1e-3);
  }
}
