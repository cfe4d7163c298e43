#include "circlet/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "circlet/compile.hpp"
#include "circlet/errors.hpp"
#include "circlet/infer.hpp"
#include "circlet/mask.hpp"
#include "circlet/rng.hpp"

namespace circlet {

namespace {

using Clock = std::chrono::steady_clock;

double mean_of(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double two_sigma_of(const std::vector<double>& xs) {
  const double mean = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return 2.0 * std::sqrt(ss / static_cast<double>(xs.size()));
}

struct AlgStats {
  std::vector<double> seconds;
  std::vector<double> lls;  // one per-run mean, empty when not applicable
};

// Times fn() and returns its value.
template <typename Fn>
auto timed(std::vector<double>& seconds, Fn&& fn) {
  const auto start = Clock::now();
  auto value = fn();
  seconds.push_back(std::chrono::duration<double>(Clock::now() - start).count());
  return value;
}

}  // namespace

std::vector<BenchRow> run_bench(const BitMatrix& data, const std::string& dataset_name,
                                const BenchConfig& cfg) {
  if (cfg.runs < 1) throw ModelError("bench needs at least one run");
  if (cfg.jobs < 1) throw ModelError("bench needs at least one job");

  const char* names[] = {"chow_liu", "compile", "clt_evi",  "clt_mar", "clt_mpe",
                         "pc_evi",   "pc_mar",  "pc_mpe",   "pc_csample"};
  constexpr int kAlgs = 9;
  AlgStats stats[kAlgs];

  for (int run = 0; run < cfg.runs; ++run) {
    const Clt model = timed(stats[0].seconds, [&] { return fit_clt(data, cfg.smoothing, 0, cfg.jobs); });
    const Circuit circuit = timed(stats[1].seconds, [&] { return compile_clt(model); });

    // One mask per run, shared across MAR / MPE / sampling.
    const MaskSpec mask_spec{cfg.mask_p,
                             counter_hash(cfg.seed, static_cast<std::uint64_t>(run), 0x6d61736bULL)};
    const MaskedBatch mask = gen_mask(data, mask_spec);
    const std::uint64_t sample_seed =
        counter_hash(cfg.seed, static_cast<std::uint64_t>(run), 0x73616d70ULL);

    const auto clt_evi_ll = timed(stats[2].seconds,
                                  [&] { return clt_evi(model, data, cfg.jobs, cfg.precision); });
    const auto clt_mar_ll = timed(stats[3].seconds,
                                  [&] { return clt_mar(model, mask, cfg.jobs, cfg.precision); });
    const auto clt_mpe_res = timed(stats[4].seconds,
                                   [&] { return clt_mpe(model, mask, cfg.jobs, cfg.precision); });
    const auto pc_evi_ll = timed(stats[5].seconds,
                                 [&] { return pc_evi(circuit, data, cfg.jobs, cfg.precision); });
    const auto pc_mar_ll = timed(stats[6].seconds,
                                 [&] { return pc_mar(circuit, mask, cfg.jobs, cfg.precision); });
    const auto pc_mpe_res = timed(stats[7].seconds,
                                  [&] { return pc_mpe(circuit, mask, cfg.jobs, cfg.precision); });
    const auto sample_res = timed(stats[8].seconds, [&] {
      return pc_conditional_sample(circuit, mask, sample_seed, cfg.jobs, cfg.precision);
    });

    stats[2].lls.push_back(mean_of(clt_evi_ll));
    stats[3].lls.push_back(mean_of(clt_mar_ll));
    stats[4].lls.push_back(mean_of(clt_mpe_res.log_values));
    stats[5].lls.push_back(mean_of(pc_evi_ll));
    stats[6].lls.push_back(mean_of(pc_mar_ll));
    stats[7].lls.push_back(mean_of(pc_mpe_res.log_values));
    stats[8].lls.push_back(mean_of(sample_res.log_values));
  }

  std::vector<BenchRow> rows;
  rows.reserve(kAlgs);
  for (int a = 0; a < kAlgs; ++a) {
    BenchRow row;
    row.dataset = dataset_name;
    row.algorithm = names[a];
    row.runs = cfg.runs;
    row.mean_seconds = mean_of(stats[a].seconds);
    row.two_sigma_seconds = two_sigma_of(stats[a].seconds);
    if (!stats[a].lls.empty()) row.mean_ll = mean_of(stats[a].lls);
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string format_double(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace

void write_report_tsv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "dataset\talgorithm\truns\tmean_s\ttwo_sigma_s\tmean_ll\n";
  for (const BenchRow& row : rows) {
    out << row.dataset << '\t' << row.algorithm << '\t' << row.runs << '\t'
        << format_double(row.mean_seconds, 6) << '\t' << format_double(row.two_sigma_seconds, 6)
        << '\t' << (row.mean_ll ? format_double(*row.mean_ll, 6) : std::string("---")) << '\n';
  }
}

void print_report_table(std::ostream& out, const std::vector<BenchRow>& rows) {
  char line[160];
  std::snprintf(line, sizeof(line), "%-12s %-12s %5s %12s %14s %12s\n", "dataset", "algorithm",
                "runs", "mean_s", "two_sigma_s", "mean_ll");
  out << line;
  for (const BenchRow& row : rows) {
    std::snprintf(line, sizeof(line), "%-12s %-12s %5d %12.4f %14.4f %12s\n", row.dataset.c_str(),
                  row.algorithm.c_str(), row.runs, row.mean_seconds, row.two_sigma_seconds,
                  row.mean_ll ? format_double(*row.mean_ll, 4).c_str() : "---");
    out << line;
  }
}

}  // namespace circlet
