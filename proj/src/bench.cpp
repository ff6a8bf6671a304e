/**
 * This code is part of qcoreset.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "qcoreset/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "qcoreset/clustering.hpp"
#include "qcoreset/ising.hpp"

namespace qcoreset {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  unsigned long long x = 0;
  try {
    if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
    x = std::stoull(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) throw std::invalid_argument("config: " + key + ": not a non-negative integer: " + v);
  return x;
}

long parse_long(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  long x = 0;
  try {
    x = std::stol(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) throw std::invalid_argument("config: " + key + ": not an integer: " + v);
  return x;
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size() || !std::isfinite(x))
    throw std::invalid_argument("config: " + key + ": not a finite number: " + v);
  return x;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config: " + key + ": not a boolean: " + v);
}

QaoaObjective parse_objective(const std::string& v) {
  if (v == "exact") return QaoaObjective::exact;
  if (v == "sampled") return QaoaObjective::sampled;
  throw std::invalid_argument("config: qaoa_objective must be exact or sampled: " + v);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return kNaN;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

std::string DatasetSource::name() const {
  if (is_synthetic()) return spec;
  return std::filesystem::path(spec).stem().string();
}

void BenchConfig::validate() const {
  if (datasets.empty()) throw std::invalid_argument("config: no datasets");
  if (algorithms.empty()) throw std::invalid_argument("config: no algorithms");
  if (coreset_sizes.empty()) throw std::invalid_argument("config: no coreset sizes");
  for (auto m : coreset_sizes) {
    if (m < 2) throw std::invalid_argument("config: coreset sizes must be >= 2");
    if (m > kMaxQubits && quantum) throw std::invalid_argument("config: coreset size exceeds the simulator");
    if (m > kMaxEnumerationSize) throw std::invalid_argument("config: coreset size exceeds the exact oracle");
  }
  if (repetitions < 1) throw std::invalid_argument("config: repetitions must be >= 1");
  if (qaoa_depth < 1 || qaoa_restarts < 1 || qaoa_shots < 1)
    throw std::invalid_argument("config: qaoa_depth, qaoa_restarts and qaoa_shots must be >= 1");
  if (lloyd_restarts < 1) throw std::invalid_argument("config: lloyd_restarts must be >= 1");
  if (noise.empty()) throw std::invalid_argument("config: no noise settings");
  for (const auto& n : noise) n.validate();
}

BenchConfig parse_bench_config(std::istream& in) {
  BenchConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "datasets") {
      cfg.datasets.clear();
      for (auto& s : split(value, ',')) cfg.datasets.push_back({s});
    } else if (key == "algorithms") {
      cfg.algorithms.clear();
      for (auto& s : split(value, ',')) cfg.algorithms.push_back(parse_coreset_algorithm(s));
    } else if (key == "coreset_sizes") {
      cfg.coreset_sizes.clear();
      for (auto& s : split(value, ',')) cfg.coreset_sizes.push_back(parse_uint(key, s));
    } else if (key == "repetitions") {
      cfg.repetitions = parse_uint(key, value);
    } else if (key == "qaoa_depth") {
      cfg.qaoa_depth = parse_uint(key, value);
    } else if (key == "qaoa_restarts") {
      cfg.qaoa_restarts = parse_uint(key, value);
    } else if (key == "qaoa_shots") {
      cfg.qaoa_shots = parse_uint(key, value);
    } else if (key == "qaoa_objective") {
      cfg.qaoa_objective = parse_objective(value);
    } else if (key == "noise_in_optimizer") {
      cfg.noise_in_optimizer = parse_bool(key, value);
    } else if (key == "noise") {
      cfg.noise.clear();
      for (auto& s : split(value, ',')) cfg.noise.push_back(parse_noise(s));
    } else if (key == "normalization") {
      cfg.normalization = parse_normalization(value);
    } else if (key == "seed") {
      cfg.seed = parse_uint(key, value);
    } else if (key == "lloyd_restarts") {
      cfg.lloyd_restarts = parse_uint(key, value);
    } else if (key == "has_header") {
      cfg.has_header = parse_bool(key, value);
    } else if (key == "label_column") {
      if (value == "none") cfg.label_column.reset();
      else cfg.label_column = parse_long(key, value);
    } else if (key == "workers") {
      cfg.workers = parse_uint(key, value);
    } else if (key == "record_runtime") {
      cfg.record_runtime = parse_bool(key, value);
    } else if (key == "quantum") {
      cfg.quantum = parse_bool(key, value);
    } else {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

BenchConfig load_bench_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  return parse_bench_config(in);
}

Dataset load_dataset(const DatasetSource& src, const BenchConfig& cfg) {
  if (src.is_synthetic()) {
    BlobSpec spec;
    spec.n = 200;
    for (const auto& kv : split(src.spec.substr(6), ';')) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("synthetic dataset: expected key=value: " + kv);
      const auto k = trim(kv.substr(0, eq));
      const auto v = trim(kv.substr(eq + 1));
      if (k == "n") spec.n = parse_uint(k, v);
      else if (k == "d") spec.d = parse_uint(k, v);
      else if (k == "sep") spec.separation = parse_double(k, v);
      else if (k == "spread") spec.spread = parse_double(k, v);
      else if (k == "seed") spec.seed = parse_uint(k, v);
      else throw std::invalid_argument("synthetic dataset: unknown key '" + k + "'");
    }
    return normalize(synth_blobs(spec), cfg.normalization);
  }

  CsvOptions opts;
  opts.has_header = cfg.has_header;
  if (cfg.label_column) {
    long col = *cfg.label_column;
    if (col < 0) {
      std::ifstream in(src.spec);
      if (!in) throw std::runtime_error("cannot open " + src.spec);
      std::string first;
      std::getline(in, first);
      const auto columns = static_cast<long>(std::count(first.begin(), first.end(), ',')) + 1;
      col += columns;
      if (col < 0) throw std::invalid_argument("label_column out of range for " + src.spec);
    }
    opts.label_column = static_cast<std::size_t>(col);
  }
  return normalize(load_csv(src.spec, opts), cfg.normalization);
}

std::uint64_t cell_seed(std::uint64_t master, const std::string& dataset, const std::string& algorithm,
                        std::size_t size, std::size_t noise_index, std::size_t repetition) {
  std::uint64_t s = derive_seed(master, fnv1a(dataset));
  s = derive_seed(s, fnv1a(algorithm));
  s = derive_seed(s, size);
  s = derive_seed(s, noise_index);
  return derive_seed(s, repetition);
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

namespace {

struct CellJob {
  std::size_t dataset;
  CoresetAlgorithm algorithm;
  std::size_t size;
  std::size_t noise;
};

struct PreparedDataset {
  std::string name;
  std::optional<Dataset> data;
  Assignment benchmark;
  std::string error;
};

void run_cell(const BenchConfig& cfg, const PreparedDataset& pd, const CellJob& job, BenchRow& row) {
  const auto& ds = *pd.data;
  const auto& noise = cfg.noise[job.noise];
  std::vector<double> cost_q;
  std::vector<double> cost_c;
  std::size_t matches = 0;
  for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
    Rng rng(cell_seed(cfg.seed, pd.name, row.algorithm, job.size, job.noise, rep));
    const Coreset c = make_coreset(ds, job.algorithm, job.size, rng);

    const auto part = classical_coreset_2means(c);
    row.acc_c.push_back(accuracy(assign(ds, part.centroids), pd.benchmark));
    cost_c.push_back(cost(ds, part.centroids));

    if (!cfg.quantum) continue;
    const auto h = build_hamiltonian(c);
    QaoaOptions qo;
    qo.depth = cfg.qaoa_depth;
    qo.restarts = cfg.qaoa_restarts;
    qo.shots = cfg.qaoa_shots;
    qo.objective = cfg.qaoa_objective;
    qo.noise_in_optimizer = cfg.noise_in_optimizer;
    const auto noise_opt = noise.is_noiseless() ? std::nullopt : std::optional<NoiseSpec>(noise);
    const auto out = run_qaoa(h, qo, noise_opt, rng);
    const auto pc = partition_to_centroids(c, out.winner.bits);
    row.acc_q.push_back(accuracy(assign(ds, pc.centroids), pd.benchmark));
    cost_q.push_back(cost(ds, pc.centroids));
    if (canonical(out.winner.bits) == canonical(brute_force_maxcut(h).bits)) ++matches;
  }
  row.acc_c_mean = mean(row.acc_c);
  row.acc_c_std = sample_std(row.acc_c);
  row.cost_c = mean(cost_c);
  if (cfg.quantum) {
    row.acc_q_mean = mean(row.acc_q);
    row.acc_q_std = sample_std(row.acc_q);
    row.cost_q = mean(cost_q);
    row.oracle_match = static_cast<double>(matches) / static_cast<double>(cfg.repetitions);
  } else {
    row.acc_q_mean = row.acc_q_std = row.cost_q = row.oracle_match = kNaN;
  }
}

void mark_failed(BenchRow& row, const std::string& reason) {
  row.failed = true;
  row.error = reason;
  row.acc_q.clear();
  row.acc_c.clear();
  row.acc_q_mean = row.acc_q_std = row.acc_c_mean = row.acc_c_std = kNaN;
  row.cost_q = row.cost_c = row.oracle_match = kNaN;
}

}  // namespace

BenchmarkReport run_benchmark(const BenchConfig& cfg) {
  cfg.validate();
  std::vector<PreparedDataset> prepared;
  for (const auto& src : cfg.datasets) {
    PreparedDataset pd{src.name(), std::nullopt, {}, {}};
    try {
      pd.data = load_dataset(src, cfg);
      Rng rng(derive_seed(cfg.seed, fnv1a(pd.name)));
      pd.benchmark = lloyd_best_of(*pd.data, 2, cfg.lloyd_restarts, rng).assignment;
    } catch (const std::exception& e) {
      pd.data.reset();
      pd.error = e.what();
    }
    prepared.push_back(std::move(pd));
  }

  std::vector<CellJob> jobs;
  BenchmarkReport report;
  for (std::size_t d = 0; d < prepared.size(); ++d)
    for (auto algo : cfg.algorithms)
      for (auto m : cfg.coreset_sizes)
        for (std::size_t z = 0; z < cfg.noise.size(); ++z) {
          jobs.push_back({d, algo, m, z});
          BenchRow row;
          row.dataset = prepared[d].name;
          row.algorithm = to_string(algo);
          row.size = m;
          row.noise = cfg.noise[z].label();
          report.rows.push_back(std::move(row));
        }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (auto i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
      auto& row = report.rows[i];
      const auto& pd = prepared[jobs[i].dataset];
      const auto t0 = std::chrono::steady_clock::now();
      if (!pd.data) {
        mark_failed(row, "dataset: " + pd.error);
        continue;
      }
      try {
        run_cell(cfg, pd, jobs[i], row);
      } catch (const std::exception& e) {
        mark_failed(row, e.what());
      }
      if (cfg.record_runtime)
        row.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  };
  std::size_t workers = cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(1, jobs.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  return report;
}

ReportFormat parse_report_format(const std::string& s) {
  if (s == "csv") return ReportFormat::csv;
  if (s == "json") return ReportFormat::json;
  throw std::invalid_argument("unknown report format: " + s);
}

void write_report_csv(const BenchmarkReport& r, std::ostream& out) {
  out << "dataset,algorithm,size,noise,acc_q_mean,acc_q_std,acc_c_mean,acc_c_std,cost_q,cost_c,oracle_match,"
         "runtime_s\n";
  for (const auto& row : r.rows) {
    out << row.dataset << ',' << row.algorithm << ',' << row.size << ',' << row.noise << ','
        << format_double(row.acc_q_mean) << ',' << format_double(row.acc_q_std) << ','
        << format_double(row.acc_c_mean) << ',' << format_double(row.acc_c_std) << ','
        << format_double(row.cost_q) << ',' << format_double(row.cost_c) << ',' << format_double(row.oracle_match)
        << ',' << format_double(row.runtime_s) << '\n';
  }
}

nlohmann::json report_to_json(const BenchmarkReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"dataset", row.dataset},
                    {"algorithm", row.algorithm},
                    {"size", row.size},
                    {"noise", row.noise},
                    {"acc_q_mean", row.acc_q_mean},
                    {"acc_q_std", row.acc_q_std},
                    {"acc_c_mean", row.acc_c_mean},
                    {"acc_c_std", row.acc_c_std},
                    {"cost_q", row.cost_q},
                    {"cost_c", row.cost_c},
                    {"oracle_match", row.oracle_match},
                    {"runtime_s", row.runtime_s},
                    {"acc_q", row.acc_q},
                    {"acc_c", row.acc_c},
                    {"failed", row.failed},
                    {"error", row.error}});
  }
  return {{"rows", rows}};
}

BenchmarkReport report_from_json(const nlohmann::json& j) {
  auto num = [](const nlohmann::json& v) { return v.is_null() ? kNaN : v.get<double>(); };
  BenchmarkReport r;
  for (const auto& x : j.at("rows")) {
    BenchRow row;
    row.dataset = x.at("dataset").get<std::string>();
    row.algorithm = x.at("algorithm").get<std::string>();
    row.size = x.at("size").get<std::size_t>();
    row.noise = x.at("noise").get<std::string>();
    row.acc_q_mean = num(x.at("acc_q_mean"));
    row.acc_q_std = num(x.at("acc_q_std"));
    row.acc_c_mean = num(x.at("acc_c_mean"));
    row.acc_c_std = num(x.at("acc_c_std"));
    row.cost_q = num(x.at("cost_q"));
    row.cost_c = num(x.at("cost_c"));
    row.oracle_match = num(x.at("oracle_match"));
    row.runtime_s = num(x.at("runtime_s"));
    row.acc_q = x.at("acc_q").get<std::vector<double>>();
    row.acc_c = x.at("acc_c").get<std::vector<double>>();
    row.failed = x.at("failed").get<bool>();
    row.error = x.at("error").get<std::string>();
    r.rows.push_back(std::move(row));
  }
  return r;
}

void emit_report(const BenchmarkReport& r, ReportFormat format, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  if (format == ReportFormat::csv) write_report_csv(r, out);
  else out << report_to_json(r).dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Projection pca2(const Eigen::MatrixXd& points) {
  if (points.cols() < 2) throw std::invalid_argument("pca2: need at least 2 dimensions");
  if (points.rows() < 1) throw std::invalid_argument("pca2: no points");
  Projection p;
  p.mean = points.colwise().mean();
  const Eigen::MatrixXd centered = points.rowwise() - p.mean;
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(points.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  const auto d = cov.rows();
  p.axes.resize(d, 2);
  for (Eigen::Index k = 0; k < 2; ++k) {
    Eigen::VectorXd axis = es.eigenvectors().col(d - 1 - k);
    Eigen::Index at = 0;
    axis.cwiseAbs().maxCoeff(&at);
    if (axis[at] < 0) axis = -axis;
    p.axes.col(k) = axis;
    p.variances[k] = std::max(0.0, es.eigenvalues()[d - 1 - k]);
  }
  p.coords = centered * p.axes;
  return p;
}

void emit_projection(const Dataset& ds, const Coreset& c, const std::filesystem::path& path) {
  if (c.dim() != ds.dim()) throw std::invalid_argument("emit_projection: coreset dimension mismatch");
  const auto p = pca2(ds.points());
  const Eigen::MatrixXd cp = (c.points.rowwise() - p.mean) * p.axes;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "pc1,pc2,coreset\n" << std::setprecision(17);
  for (Eigen::Index i = 0; i < p.coords.rows(); ++i) out << p.coords(i, 0) << ',' << p.coords(i, 1) << ",0\n";
  for (Eigen::Index i = 0; i < cp.rows(); ++i) out << cp(i, 0) << ',' << cp(i, 1) << ",1\n";
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Bits argmax_symmetric_pair(const std::vector<double>& probs, std::size_t n_qubits) {
  if (n_qubits < 1 || probs.size() != (std::size_t{1} << n_qubits))
    throw std::invalid_argument("argmax_symmetric_pair: size mismatch");
  const std::uint64_t all = probs.size() - 1;
  std::uint64_t best = 0;
  double best_p = -1.0;
  for (std::uint64_t i = 0; i < probs.size() / 2; ++i) {
    const double p = probs[i] + probs[i ^ all];
    if (p > best_p) {
      best_p = p;
      best = i;
    }
  }
  return index_to_bits(best, n_qubits);
}

nlohmann::json QaeDemoResult::to_json() const {
  return {{"clean_probabilities", clean_probs},
          {"noisy_probabilities", noisy_probs},
          {"restored_probabilities", restored_probs},
          {"fidelity_noisy", fidelity_noisy},
          {"fidelity_untrained", fidelity_untrained},
          {"fidelity_trained", fidelity_trained},
          {"clean_pair", bits_to_string(clean_pair)},
          {"noisy_pair", bits_to_string(noisy_pair)},
          {"restored_pair", bits_to_string(restored_pair)},
          {"qubit_budget", qae_qubit_budget(network.spec)}};
}

QaeDemoResult run_qae_demo(const QaeDemoConfig& cfg) {
  if (cfg.size < 2 || cfg.size > 6) throw std::invalid_argument("run_qae_demo: size must be in [2, 6]");
  if (cfg.pairs_per_epoch < 1) throw std::invalid_argument("run_qae_demo: pairs_per_epoch must be >= 1");
  Rng rng(cfg.seed);
  const auto m = cfg.size;

  Coreset c;
  c.points.resize(static_cast<Eigen::Index>(m), 2);
  for (Eigen::Index i = 0; i < c.points.rows(); ++i)
    for (Eigen::Index j = 0; j < 2; ++j) c.points(i, j) = standard_normal(rng);
  c.weights.assign(m, 1.0);
  c.probs.assign(m, 1.0);
  c.source_indices.resize(m);
  std::iota(c.source_indices.begin(), c.source_indices.end(), std::size_t{0});

  const auto h = build_hamiltonian(c);
  QaoaOptions qo;
  qo.depth = cfg.qaoa_depth;
  qo.restarts = cfg.qaoa_restarts;
  const auto qaoa = run_qaoa(h, qo, std::nullopt, rng);
  // the same scaled Hamiltonian run_qaoa optimised against
  const double scale = h.max_abs() > 0.0 ? 1.0 / h.max_abs() : 1.0;
  const auto circuit = build_qaoa_circuit(h.scaled(scale), qaoa.best_params);
  const auto clean = apply(circuit, zero_state(m));
  const auto noisy = bitflip_channel(DensityMatrix(clean), cfg.bitflip);

  const QnnLayerSpec spec{{m, 1, m}};
  const auto untrained = QnnNetwork::random(spec, rng, 0.01);
  const std::vector<QaePair> eval{{noisy, clean}};
  const auto noise = NoiseSpec::bitflip(cfg.bitflip);
  const PairSource source = [&](std::size_t, Rng& r) {
    return trajectory_pairs(circuit, noise, cfg.pairs_per_epoch, r);
  };
  const auto trained = train(untrained, source, eval, cfg.train, rng);

  QaeDemoResult out;
  out.clean_probs = clean.probabilities();
  out.noisy_probs = noisy.probabilities();
  const auto restored = feedforward(trained.network, noisy);
  out.restored_probs = restored.probabilities();
  out.fidelity_noisy = fidelity(noisy, clean);
  out.fidelity_untrained = fidelity(feedforward(untrained, noisy), clean);
  out.fidelity_trained = fidelity(restored, clean);
  out.clean_pair = argmax_symmetric_pair(out.clean_probs, m);
  out.noisy_pair = argmax_symmetric_pair(out.noisy_probs, m);
  out.restored_pair = argmax_symmetric_pair(out.restored_probs, m);
  out.network = trained.network;
  out.history = trained.history;
  return out;
}

}  // namespace qcoreset
