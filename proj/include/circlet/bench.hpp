#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "circlet/bitmatrix.hpp"
#include "circlet/clt.hpp"
#include "circlet/logspace.hpp"

namespace circlet {

struct BenchConfig {
  int runs = 10;
  unsigned jobs = 1;
  Precision precision = Precision::kF64;
  double mask_p = 0.5;
  std::uint64_t seed = 0;
  SmoothingSpec smoothing;
};

struct BenchRow {
  std::string dataset;
  std::string algorithm;
  int runs = 0;
  double mean_seconds = 0.0;
  double two_sigma_seconds = 0.0;
  std::optional<double> mean_ll;  // absent for structure learning / compilation
};

// Full pipeline, timed over cfg.runs independent runs: Chow-Liu fit, circuit
// compilation, then EVI/MAR/MPE on both the tree and the compiled circuit and
// conditional sampling on the circuit. One mask is drawn per run from
// (seed, run) and shared by MAR, MPE, and sampling within that run; EVI uses
// the raw data. Timing wraps the algorithm call only, never mask generation
// or I/O. The log-likelihood columns are a pure function of (data, cfg).
std::vector<BenchRow> run_bench(const BitMatrix& data, const std::string& dataset_name,
                                const BenchConfig& cfg);

// Tab-separated rows: dataset  algorithm  runs  mean_s  two_sigma_s  mean_ll
// with "---" for an absent mean_ll.
void write_report_tsv(std::ostream& out, const std::vector<BenchRow>& rows);

// Human-readable aligned table.
void print_report_table(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace circlet
