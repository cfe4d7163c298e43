#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "circlet/compile.hpp"
#include "circlet/errors.hpp"
#include "circlet/infer.hpp"
#include "circlet/logspace.hpp"
#include "circlet/oracle.hpp"
#include "circlet/rng.hpp"

using namespace circlet;

namespace {

BitMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  BitMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      if (counter_hash(seed, r, c) & 1) m.set(r, c, true);
  return m;
}

Clt uniform_prior_model() {
  Clt model;
  model.var_count = 1;
  model.root = 0;
  model.parent = {-1};
  model.log_factors.assign(1, {});
  model.log_factors[0][0] = {std::log(0.5), std::log(0.5)};
  model.log_factors[0][1] = model.log_factors[0][0];
  model.rebuild_derived();
  return model;
}

}  // namespace

TEST_CASE("brute table of a uniform prior") {
  const auto table = brute_evi_table(uniform_prior_model());
  REQUIRE(table.size() == 2);
  CHECK(table[0] == doctest::Approx(std::log(0.5)).epsilon(1e-12));
  CHECK(table[1] == doctest::Approx(std::log(0.5)).epsilon(1e-12));
}

TEST_CASE("brute tables normalize for trees and circuits") {
  for (std::uint64_t seed : {1u, 2u}) {
    const Clt model = fit_clt(random_matrix(64, 7, seed), {0.01});
    const auto tree_table = brute_evi_table(model);
    CHECK(log_sum_exp<double>(tree_table) == doctest::Approx(0.0).epsilon(1e-9));
    const auto circuit_table = brute_evi_table(compile_clt(model));
    CHECK(log_sum_exp<double>(circuit_table) == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("tree and compiled-circuit tables agree pointwise") {
  const Clt model = fit_clt(random_matrix(64, 3, 5), {0.01});
  const auto tree_table = brute_evi_table(model);
  const auto circuit_table = brute_evi_table(compile_clt(model));
  REQUIRE(tree_table.size() == 8);
  for (std::size_t a = 0; a < 8; ++a)
    CHECK(tree_table[a] == doctest::Approx(circuit_table[a]).epsilon(1e-12));
}

TEST_CASE("degenerate masks: all marginalized sums to one, none reduces to EVI") {
  const Clt model = fit_clt(random_matrix(64, 5, 7), {0.01});
  const std::vector<Cell> all_marg(5, Cell::kMarg);
  CHECK(brute_mar(model, all_marg) == doctest::Approx(0.0).epsilon(1e-9));

  const auto table = brute_evi_table(model);
  std::vector<Cell> observed = {Cell::kObs1, Cell::kObs0, Cell::kObs1, Cell::kObs1, Cell::kObs0};
  const std::size_t index = 0b01101;  // x0=1 x1=0 x2=1 x3=1 x4=0
  CHECK(brute_mar(model, observed) == doctest::Approx(table[index]).epsilon(1e-12));
  const BruteMpe mpe = brute_mpe(model, observed);
  CHECK(mpe.log_value == doctest::Approx(table[index]).epsilon(1e-12));
  CHECK(mpe.completion == std::vector<std::uint8_t>{1, 0, 1, 1, 0});
}

TEST_CASE("ties resolve to the lexicographically smallest completion") {
  const auto table = brute_evi_table(uniform_prior_model());
  const std::vector<Cell> free_row = {Cell::kMarg};
  const BruteMpe mpe = brute_mpe_from_table(table, free_row);
  CHECK(mpe.completion == std::vector<std::uint8_t>{0});
}

TEST_CASE("the engine matches the oracle on a ten-variable instance") {
  const BitMatrix data = random_matrix(64, 10, 9);
  const Clt model = fit_clt(data, {0.01});
  const Circuit circuit = compile_clt(model);
  const auto table = brute_evi_table(model);

  const MaskedBatch mask = gen_mask(random_matrix(8, 10, 10), {0.5, 11});
  const auto tree_mar = clt_mar(model, mask);
  const auto circuit_mar = pc_mar(circuit, mask);
  const auto tree_mpe = clt_mpe(model, mask);
  const auto circuit_mpe = pc_mpe(circuit, mask);
  for (std::size_t r = 0; r < mask.rows(); ++r) {
    std::vector<Cell> row(10);
    for (std::size_t c = 0; c < 10; ++c) row[c] = mask.at(r, c);
    const double want_mar = brute_mar_from_table(table, row);
    const BruteMpe want_mpe = brute_mpe_from_table(table, row);
    CHECK(std::abs(tree_mar[r] - want_mar) <= 1e-6);
    CHECK(std::abs(circuit_mar[r] - want_mar) <= 1e-6);
    CHECK(std::abs(tree_mpe.log_values[r] - want_mpe.log_value) <= 1e-6);
    CHECK(std::abs(circuit_mpe.log_values[r] - want_mpe.log_value) <= 1e-6);
  }
}

TEST_CASE("the brute-force cap rejects oversized models") {
  Clt big;
  big.var_count = 21;
  big.root = 0;
  big.parent.assign(21, 0);
  big.parent[0] = -1;
  big.log_factors.assign(21, {});
  for (auto& table : big.log_factors)
    for (int s = 0; s < 2; ++s) table[s] = {std::log(0.5), std::log(0.5)};
  big.rebuild_derived();
  CHECK_THROWS_AS(brute_evi_table(big), TooManyVariables);
}
