#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "circlet/circuit.hpp"
#include "circlet/clt.hpp"
#include "circlet/mask.hpp"

namespace circlet {

// Brute-force reference implementations, intentionally naive and independent
// of the engine code paths: models are evaluated directly from their
// definition, in probability space, on explicitly enumerated assignments.
// Hard cap at 20 variables.

// Log-value of every assignment; assignment a sets x_i = bit i of a.
std::vector<double> brute_evi_table(const Clt& model);
std::vector<double> brute_evi_table(const Circuit& c);

double brute_mar(const Clt& model, std::span<const Cell> row);
double brute_mar(const Circuit& c, std::span<const Cell> row);
double brute_mar_from_table(std::span<const double> table, std::span<const Cell> row);

struct BruteMpe {
  std::vector<std::uint8_t> completion;
  double log_value;
};

// Max over evidence-consistent assignments; exact ties resolve to the
// lexicographically smallest completion (x_0 most significant).
BruteMpe brute_mpe(const Clt& model, std::span<const Cell> row);
BruteMpe brute_mpe(const Circuit& c, std::span<const Cell> row);
BruteMpe brute_mpe_from_table(std::span<const double> table, std::span<const Cell> row);

}  // namespace circlet
