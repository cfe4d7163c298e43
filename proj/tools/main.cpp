#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "circlet/bench.hpp"
#include "circlet/bitmatrix.hpp"
#include "circlet/circuit.hpp"
#include "circlet/clt.hpp"
#include "circlet/compile.hpp"
#include "circlet/errors.hpp"
#include "circlet/infer.hpp"
#include "circlet/manifest.hpp"
#include "circlet/mask.hpp"

namespace {

// Exit codes: 0 ok, 2 usage, 3 data errors, 4 model errors.
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitModel = 4;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

circlet::Precision parse_precision(int bits) {
  return bits == 32 ? circlet::Precision::kF32 : circlet::Precision::kF64;
}

// Model files are JSON documents; tree models carry "parents", circuits carry
// "nodes".
std::variant<circlet::Clt, circlet::Circuit> load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw circlet::ModelError("cannot open model file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw circlet::ModelError(path + ": not a valid model file (" + e.what() + ")");
  }
  if (j.contains("parents")) return circlet::load_clt(path);
  if (j.contains("nodes")) return circlet::load_circuit(path);
  throw circlet::ModelError(path + ": neither a tree model nor a circuit");
}

double mean_of(const std::vector<double>& xs) {
  double total = 0.0;
  for (double x : xs) total += x;
  return total / static_cast<double>(xs.size());
}

int run(int argc, char** argv) {
  CLI::App app{"Binary Chow-Liu trees and probabilistic circuits: learning, "
               "exact EVI/MAR/MPE queries, conditional sampling, benchmarks"};
  app.require_subcommand(1);

  // ---- fit-clt ----
  std::string fit_data, fit_out;
  double fit_alpha = 0.01;
  std::int32_t fit_root = 0;
  auto* fit = app.add_subcommand("fit-clt", "Learn a Chow-Liu tree from a 0/1 CSV dataset");
  fit->add_option("--data", fit_data, "dataset CSV")->required();
  fit->add_option("--alpha", fit_alpha, "Laplace smoothing pseudo-count");
  fit->add_option("--root", fit_root, "root variable index");
  fit->add_option("--out", fit_out, "output model file")->required();

  // ---- compile ----
  std::string compile_model, compile_out;
  auto* compile = app.add_subcommand("compile", "Compile a tree model into a circuit");
  compile->add_option("--model", compile_model, "tree model file")->required();
  compile->add_option("--out", compile_out, "output circuit file")->required();

  // ---- query ----
  std::string query_model, query_data, query_kind;
  double query_mask_p = 0.5;
  std::uint64_t query_seed = 0;
  unsigned query_jobs = 1;
  int query_precision = 64;
  auto* query = app.add_subcommand("query", "Run EVI/MAR/MPE queries over a dataset");
  query->add_option("--model", query_model, "model file (tree or circuit)")->required();
  query->add_option("--data", query_data, "dataset CSV")->required();
  query->add_option("--kind", query_kind, "evi|mar|mpe")
      ->required()
      ->check(CLI::IsMember({"evi", "mar", "mpe"}));
  query->add_option("--mask-p", query_mask_p, "marginalization probability (mar/mpe)");
  query->add_option("--seed", query_seed, "mask seed");
  query->add_option("--jobs", query_jobs, "parallel jobs");
  query->add_option("--precision", query_precision, "32 or 64")
      ->check(CLI::IsMember({32, 64}));

  // ---- sample ----
  std::string sample_model, sample_data, sample_out;
  double sample_mask_p = 0.5;
  std::uint64_t sample_seed = 0;
  unsigned sample_jobs = 1;
  auto* sample = app.add_subcommand(
      "sample", "Conditionally sample completions of a masked dataset from a circuit");
  sample->add_option("--model", sample_model, "circuit file")->required();
  sample->add_option("--data", sample_data, "dataset CSV")->required();
  sample->add_option("--mask-p", sample_mask_p, "marginalization probability");
  sample->add_option("--seed", sample_seed, "mask and sampling seed");
  sample->add_option("--jobs", sample_jobs, "parallel jobs");
  sample->add_option("--out", sample_out, "output CSV of completions")->required();

  // ---- bench ----
  std::vector<std::string> bench_data;
  circlet::BenchConfig bench_cfg;
  int bench_precision = 64;
  std::string bench_report;
  auto* bench = app.add_subcommand("bench", "Timed pipeline: fit, compile, queries, sampling");
  bench->add_option("--data", bench_data, "dataset CSV (repeatable)")->required();
  bench->add_option("--runs", bench_cfg.runs, "independent runs to average");
  bench->add_option("--jobs", bench_cfg.jobs, "parallel jobs");
  bench->add_option("--mask-p", bench_cfg.mask_p, "marginalization probability");
  bench->add_option("--seed", bench_cfg.seed, "mask/sampling seed");
  bench->add_option("--precision", bench_precision, "32 or 64")
      ->check(CLI::IsMember({32, 64}));
  bench->add_option("--report", bench_report, "output TSV report")->required();

  // ---- verify-data ----
  std::string verify_manifest;
  auto* verify = app.add_subcommand("verify-data", "Check datasets against a manifest");
  verify->add_option("--manifest", verify_manifest, "manifest JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  if (fit->parsed()) {
    const circlet::BitMatrix data = circlet::load_binary_csv(fit_data);
    const auto start = Clock::now();
    const circlet::Clt model = circlet::fit_clt(data, {fit_alpha}, fit_root);
    const double elapsed = seconds_since(start);
    circlet::save_clt(model, fit_out);
    std::printf("fit-clt: %zu rows, %zu variables, %.6f s\n", data.rows(), data.cols(), elapsed);
    return 0;
  }

  if (compile->parsed()) {
    const circlet::Clt model = circlet::load_clt(compile_model);
    const auto start = Clock::now();
    const circlet::Circuit circuit = circlet::compile_clt(model);
    const double elapsed = seconds_since(start);
    circlet::save_circuit(circuit, compile_out);
    const circlet::StructureReport report = circlet::validate(circuit);
    std::printf("compile: %zu sums, %zu products, %zu leaves, %.6f s\n", report.sum_count,
                report.product_count, report.leaf_count, elapsed);
    return 0;
  }

  if (query->parsed()) {
    const auto model = load_model(query_model);
    const circlet::BitMatrix data = circlet::load_binary_csv(query_data);
    const circlet::Precision precision = parse_precision(query_precision);
    const circlet::QueryKind kind = query_kind == "evi"   ? circlet::QueryKind::kEvi
                                    : query_kind == "mar" ? circlet::QueryKind::kMar
                                                          : circlet::QueryKind::kMpe;
    const bool is_tree = std::holds_alternative<circlet::Clt>(model);

    circlet::MaskedBatch mask;
    if (kind != circlet::QueryKind::kEvi)
      mask = circlet::gen_mask(data, {query_mask_p, query_seed});

    std::vector<double> lls;
    const auto start = Clock::now();
    switch (kind) {
      case circlet::QueryKind::kEvi:
        lls = is_tree
                  ? circlet::clt_evi(std::get<circlet::Clt>(model), data, query_jobs, precision)
                  : circlet::pc_evi(std::get<circlet::Circuit>(model), data, query_jobs,
                                    precision);
        break;
      case circlet::QueryKind::kMar:
        lls = is_tree
                  ? circlet::clt_mar(std::get<circlet::Clt>(model), mask, query_jobs, precision)
                  : circlet::pc_mar(std::get<circlet::Circuit>(model), mask, query_jobs,
                                    precision);
        break;
      default: {
        auto result =
            is_tree
                ? circlet::clt_mpe(std::get<circlet::Clt>(model), mask, query_jobs, precision)
                : circlet::pc_mpe(std::get<circlet::Circuit>(model), mask, query_jobs, precision);
        lls = std::move(result.log_values);
        break;
      }
    }
    const double elapsed = seconds_since(start);
    std::printf("query %s: rows=%zu mean_ll=%.6f time_s=%.6f\n", query_kind.c_str(), data.rows(),
                mean_of(lls), elapsed);
    return 0;
  }

  if (sample->parsed()) {
    const auto model = load_model(sample_model);
    if (!std::holds_alternative<circlet::Circuit>(model))
      throw circlet::ModelError("sample needs a circuit model; compile the tree first");
    const circlet::Circuit& circuit = std::get<circlet::Circuit>(model);
    const circlet::BitMatrix data = circlet::load_binary_csv(sample_data);
    const circlet::MaskedBatch mask = circlet::gen_mask(data, {sample_mask_p, sample_seed});
    const auto start = Clock::now();
    const circlet::SampleBatch result =
        circlet::pc_conditional_sample(circuit, mask, sample_seed, sample_jobs);
    const double elapsed = seconds_since(start);
    circlet::save_binary_csv(result.completions, sample_out);
    std::printf("sample: rows=%zu mean_ll=%.6f time_s=%.6f\n", result.completions.rows(),
                mean_of(result.log_values), elapsed);
    return 0;
  }

  if (bench->parsed()) {
    bench_cfg.precision = parse_precision(bench_precision);
    std::vector<circlet::BenchRow> all_rows;
    for (const std::string& path : bench_data) {
      const circlet::BitMatrix data = circlet::load_binary_csv(path);
      const std::string name = std::filesystem::path(path).stem().string();
      std::fprintf(stderr, "bench: %s (%zu x %zu), %d runs, %u jobs\n", name.c_str(), data.rows(),
                   data.cols(), bench_cfg.runs, bench_cfg.jobs);
      auto rows = circlet::run_bench(data, name, bench_cfg);
      all_rows.insert(all_rows.end(), rows.begin(), rows.end());
    }
    std::ofstream report(bench_report);
    if (!report) throw circlet::DataError("cannot write report " + bench_report);
    circlet::write_report_tsv(report, all_rows);
    circlet::print_report_table(std::cout, all_rows);
    return 0;
  }

  if (verify->parsed()) {
    const auto entries = circlet::load_manifest(verify_manifest);
    bool bad_present = false;
    for (const auto& entry : entries) {
      const circlet::DatasetStatus status = circlet::verify_dataset(entry);
      std::printf("%-10s %-30s %s\n", entry.name.c_str(), entry.resolved.c_str(),
                  status.detail.c_str());
      if (status.present && (!status.shape_ok || !status.checksum_ok)) bad_present = true;
    }
    return bad_present ? kExitData : 0;
  }

  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const circlet::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  } catch (const circlet::ModelError& e) {
    std::fprintf(stderr, "model error: %s\n", e.what());
    return kExitModel;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
