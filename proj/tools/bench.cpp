/**
 * This code is part of qcoreset.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "qcoreset/bench.hpp"

namespace fs = std::filesystem;
using namespace qcoreset;

namespace {

int cmd_run(const std::string& config, const fs::path& out_dir, const std::string& format) {
  const auto cfg = load_bench_config(config);
  const auto fmt = parse_report_format(format);
  fs::create_directories(out_dir);
  const auto report = run_benchmark(cfg);
  const auto path = out_dir / (fmt == ReportFormat::csv ? "report.csv" : "report.json");
  emit_report(report, fmt, path);
  std::size_t failed = 0;
  for (const auto& row : report.rows) {
    if (!row.failed) continue;
    ++failed;
    std::cerr << "cell failed: " << row.dataset << ' ' << row.algorithm << ' ' << row.size << ' ' << row.noise
              << ": " << row.error << '\n';
  }
  std::cout << "wrote " << path.string() << " (" << report.rows.size() << " cells, " << failed << " failed)\n";
  return 0;
}

int cmd_project(const std::string& dataset, const std::string& algorithm, std::size_t size, std::uint64_t seed,
                const fs::path& out, bool has_header, const std::string& normalization) {
  BenchConfig cfg;
  cfg.has_header = has_header;
  cfg.normalization = parse_normalization(normalization);
  const auto ds = load_dataset({dataset}, cfg);
  Rng rng(seed);
  const auto c = make_coreset(ds, parse_coreset_algorithm(algorithm), size, rng);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  emit_projection(ds, c, out);
  std::cout << "wrote " << out.string() << '\n';
  return 0;
}

int cmd_qae_demo(const QaeDemoConfig& cfg, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const auto r = run_qae_demo(cfg);
  std::ofstream(out_dir / "network.json") << r.network.to_json().dump(2) << '\n';
  std::ofstream(out_dir / "summary.json") << r.to_json().dump(2) << '\n';
  write_cost_history(r.history, out_dir / "cost_history.csv");
  std::cout << "fidelity noisy " << r.fidelity_noisy << ", untrained " << r.fidelity_untrained << ", trained "
            << r.fidelity_trained << '\n'
            << "argmax pair clean " << bits_to_string(r.clean_pair) << ", noisy " << bits_to_string(r.noisy_pair)
            << ", restored " << bits_to_string(r.restored_pair) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coreset-based quantum 2-means benchmarks"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a benchmark sweep from a config file");
  std::string config;
  std::string out_dir;
  std::string format = "csv";
  run->add_option("--config", config, "key = value config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  auto* project = app.add_subcommand("project", "Write a 2-D PCA projection of a dataset and one coreset");
  std::string dataset;
  std::string algorithm = "bfl16";
  std::size_t size = 5;
  std::uint64_t seed = 0;
  std::string out_csv;
  bool no_header = false;
  std::string normalization = "none";
  project->add_option("--dataset", dataset, "CSV file, label in the last column")->required();
  project->add_option("--algorithm", algorithm, "bfl16 or oneshot")->check(CLI::IsMember({"bfl16", "oneshot"}));
  project->add_option("--size", size, "coreset size")->check(CLI::Range(2, 1 << 20));
  project->add_option("--seed", seed, "RNG seed");
  project->add_option("--out", out_csv, "output CSV")->required();
  project->add_flag("--no-header", no_header, "the CSV has no header row");
  project->add_option("--normalization", normalization, "none, zscore or minmax");

  auto* qae = app.add_subcommand("qae-demo", "Train an autoencoder to undo bit-flip noise on a QAOA state");
  QaeDemoConfig qcfg;
  std::string qae_out;
  qae->add_option("--size", qcfg.size, "qubits")->check(CLI::Range(2, 6));
  qae->add_option("--bitflip", qcfg.bitflip, "bit-flip rate")->check(CLI::Range(0.0, 1.0));
  qae->add_option("--epochs", qcfg.train.epochs, "training epochs")->check(CLI::PositiveNumber);
  qae->add_option("--pairs", qcfg.pairs_per_epoch, "training pairs per epoch")->check(CLI::PositiveNumber);
  qae->add_option("--step", qcfg.train.step, "initial gradient step")->check(CLI::PositiveNumber);
  qae->add_option("--seed", qcfg.seed, "RNG seed");
  qae->add_option("--out", qae_out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config, out_dir, format);
    if (*project) return cmd_project(dataset, algorithm, size, seed, out_csv, !no_header, normalization);
    if (*qae) return cmd_qae_demo(qcfg, qae_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
