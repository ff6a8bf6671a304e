/**
 * This code is part of qcoreset.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "qcoreset/qaoa.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace qcoreset {

//----------------------------------------------------------------------------
// Nelder-Mead
//----------------------------------------------------------------------------

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0, const NelderMeadOptions& opts) {
  const std::size_t k = x0.size();
  if (k == 0) throw std::invalid_argument("nelder_mead: need at least one coordinate");
  constexpr double rho = 1.0, chi = 2.0, psi = 0.5, sigma = 0.5;

  std::size_t evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    return f(x);
  };

  std::vector<std::vector<double>> sim(k + 1, x0);
  for (std::size_t j = 0; j < k; ++j) {
    auto& y = sim[j + 1];
    y[j] = (y[j] != 0.0) ? (1.0 + opts.relative_step) * y[j] : opts.zero_step;
  }
  std::vector<double> fs(k + 1);
  for (std::size_t j = 0; j <= k; ++j) fs[j] = eval(sim[j]);

  std::vector<std::size_t> order(k + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return fs[a] < fs[b]; });
    std::vector<std::vector<double>> s2;
    std::vector<double> f2;
    for (auto o : order) {
      s2.push_back(sim[o]);
      f2.push_back(fs[o]);
    }
    sim = std::move(s2);
    fs = std::move(f2);
  };
  sort_simplex();

  std::size_t iterations = 0;
  std::vector<double> centroid(k), xr(k), xe(k), xc(k);
  while (evals < opts.max_evals) {
    double xspread = 0.0, fspread = 0.0;
    for (std::size_t j = 1; j <= k; ++j) {
      fspread = std::max(fspread, std::abs(fs[j] - fs[0]));
      for (std::size_t t = 0; t < k; ++t) xspread = std::max(xspread, std::abs(sim[j][t] - sim[0][t]));
    }
    if (xspread <= opts.xtol && fspread <= opts.ftol) break;
    ++iterations;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t t = 0; t < k; ++t) centroid[t] += sim[j][t] / static_cast<double>(k);
    const auto& worst = sim[k];
    for (std::size_t t = 0; t < k; ++t) xr[t] = (1 + rho) * centroid[t] - rho * worst[t];
    const double fr = eval(xr);

    bool shrink = false;
    if (fr < fs[0]) {
      for (std::size_t t = 0; t < k; ++t) xe[t] = (1 + rho * chi) * centroid[t] - rho * chi * worst[t];
      const double fe = eval(xe);
      if (fe < fr) {
        sim[k] = xe;
        fs[k] = fe;
      } else {
        sim[k] = xr;
        fs[k] = fr;
      }
    } else if (fr < fs[k - 1]) {
      sim[k] = xr;
      fs[k] = fr;
    } else if (fr < fs[k]) {
      // outside contraction
      for (std::size_t t = 0; t < k; ++t) xc[t] = (1 + psi * rho) * centroid[t] - psi * rho * worst[t];
      const double fc = eval(xc);
      if (fc <= fr) {
        sim[k] = xc;
        fs[k] = fc;
      } else {
        shrink = true;
      }
    } else {
      // inside contraction
      for (std::size_t t = 0; t < k; ++t) xc[t] = (1 - psi) * centroid[t] + psi * worst[t];
      const double fc = eval(xc);
      if (fc < fs[k]) {
        sim[k] = xc;
        fs[k] = fc;
      } else {
        shrink = true;
      }
    }
    if (shrink) {
      for (std::size_t j = 1; j <= k; ++j) {
        for (std::size_t t = 0; t < k; ++t) sim[j][t] = sim[0][t] + sigma * (sim[j][t] - sim[0][t]);
        fs[j] = eval(sim[j]);
      }
    }
    sort_simplex();
  }
  return {sim[0], fs[0], evals, iterations};
}

//----------------------------------------------------------------------------
// QAOA
//----------------------------------------------------------------------------

std::vector<double> QaoaParams::flatten() const {
  std::vector<double> x(gammas);
  x.insert(x.end(), betas.begin(), betas.end());
  return x;
}

QaoaParams QaoaParams::unflatten(std::span<const double> x) {
  if (x.size() % 2 != 0 || x.empty()) throw std::invalid_argument("QaoaParams: need 2p values");
  const auto p = x.size() / 2;
  return {std::vector<double>(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(p)),
          std::vector<double>(x.begin() + static_cast<std::ptrdiff_t>(p), x.end())};
}

Circuit build_qaoa_circuit(const IsingHamiltonian& h, const QaoaParams& params, RzzLowering lowering) {
  if (params.gammas.size() != params.betas.size() || params.gammas.empty())
    throw std::invalid_argument("build_qaoa_circuit: need p >= 1 matching gammas and betas");
  const auto n = h.n_qubits();
  Circuit c(n);
  for (std::size_t q = 0; q < n; ++q) c.h(q);
  const auto terms = h.terms();
  for (std::size_t l = 0; l < params.depth(); ++l) {
    for (const auto& t : terms) {
      const double theta = 2.0 * params.gammas[l] * t.c;
      if (lowering == RzzLowering::native) {
        c.rzz(t.i, t.j, theta);
      } else {
        c.cnot(t.i, t.j).rz(t.j, theta).cnot(t.i, t.j);
      }
    }
    for (std::size_t q = 0; q < n; ++q) c.rx(q, 2.0 * params.betas[l]);
  }
  return c;
}

std::vector<std::pair<std::string, std::size_t>> ranked(const Counts& counts) {
  std::vector<std::pair<std::string, std::size_t>> out(counts.begin(), counts.end());
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

Bits top_symmetric_pair(const Counts& counts) {
  if (counts.empty()) throw std::invalid_argument("top_symmetric_pair: empty counts");
  std::map<std::string, std::size_t> pair_counts;
  for (const auto& [k, v] : counts) pair_counts[bits_to_string(canonical(bits_from_string(k)))] += v;
  // std::map iterates lexicographically, so strict > keeps the smallest on ties
  std::string best;
  std::size_t best_count = 0;
  for (const auto& [k, v] : pair_counts) {
    if (v > best_count) {
      best = k;
      best_count = v;
    }
  }
  return bits_from_string(best);
}

nlohmann::json QaoaOutcome::to_json() const {
  nlohmann::json top = nlohmann::json::array();
  const auto r = ranked(distribution);
  for (std::size_t i = 0; i < std::min<std::size_t>(8, r.size()); ++i)
    top.push_back({{"bits", r[i].first},
                   {"count", r[i].second},
                   {"probability", static_cast<double>(r[i].second) / static_cast<double>(shots)}});
  return {{"params", {{"p", best_params.depth()}, {"gammas", best_params.gammas}, {"betas", best_params.betas}}},
          {"energy", energy},
          {"shots", shots},
          {"top", top},
          {"winner", bits_to_string(winner.bits)},
          {"cut_value", winner.value},
          {"winner_energy", winner.energy}};
}

namespace {

// Mean of `trajectories` noisy runs, each contributing shots/trajectories samples.
Counts sample_noisy(const Circuit& circuit, const NoiseSpec& noise, std::size_t shots, std::size_t trajectories,
                    Rng& rng) {
  const auto n = circuit.n_qubits();
  if (trajectories == 0 || trajectories > shots) trajectories = shots;
  Counts total;
  for (std::size_t t = 0; t < trajectories; ++t) {
    const std::size_t share = shots / trajectories + (t < shots % trajectories ? 1 : 0);
    const auto state = apply_noisy(circuit, zero_state(n), noise, rng);
    for (const auto& [k, v] : sample(state, share, rng)) total[k] += v;
  }
  return total;
}

}  // namespace

QaoaOutcome run_qaoa(const IsingHamiltonian& h, const QaoaOptions& opts, const std::optional<NoiseSpec>& noise,
                     Rng& rng) {
  if (h.n_qubits() > kMaxQubits) throw std::invalid_argument("run_qaoa: too many qubits");
  if (opts.restarts < 1) throw std::invalid_argument("run_qaoa: restarts must be >= 1");
  if (opts.depth < 1) throw std::invalid_argument("run_qaoa: depth must be >= 1");
  if (opts.shots < 1) throw std::invalid_argument("run_qaoa: shots must be >= 1");
  if (noise) noise->validate();

  const auto n = h.n_qubits();
  const double scale = h.max_abs() > 0.0 ? 1.0 / h.max_abs() : 1.0;
  const IsingHamiltonian hs = h.scaled(scale);
  const auto diag = energy_table(hs);
  const bool noisy_loop = opts.noise_in_optimizer && noise && !noise->is_noiseless();

  std::uint64_t eval_seed = rng();
  auto objective = [&](std::span<const double> x) {
    const auto circuit = build_qaoa_circuit(hs, QaoaParams::unflatten(x));
    // common random numbers: every evaluation replays the same noise stream
    Rng local(eval_seed);
    if (opts.objective == QaoaObjective::exact) {
      if (!noisy_loop) return expectation_diagonal(apply(circuit, zero_state(n)), diag);
      double acc = 0.0;
      for (std::size_t t = 0; t < opts.optimizer_trajectories; ++t)
        acc += expectation_diagonal(apply_noisy(circuit, zero_state(n), *noise, local), diag);
      return acc / static_cast<double>(std::max<std::size_t>(1, opts.optimizer_trajectories));
    }
    const Counts counts = noisy_loop ? sample_noisy(circuit, *noise, opts.shots, opts.trajectories, local)
                                     : sample(apply(circuit, zero_state(n)), opts.shots, local);
    double acc = 0.0;
    for (const auto& [k, v] : counts) acc += static_cast<double>(v) * diag[bits_to_index(bits_from_string(k))];
    return acc / static_cast<double>(opts.shots);
  };

  QaoaOutcome out;
  double best_f = std::numeric_limits<double>::infinity();
  std::vector<double> best_x;
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t r = 0; r < opts.restarts; ++r) {
    std::vector<double> x0(2 * opts.depth);
    for (std::size_t l = 0; l < opts.depth; ++l) x0[l] = uniform(rng, 0.0, two_pi);
    for (std::size_t l = 0; l < opts.depth; ++l) x0[opts.depth + l] = uniform(rng, 0.0, std::numbers::pi);
    const auto res = nelder_mead(objective, x0, opts.nelder_mead);
    out.evaluations += res.evals;
    out.restart_energies.push_back(res.f / scale);
    if (res.f < best_f) {
      best_f = res.f;
      best_x = res.x;
    }
  }

  out.best_params = QaoaParams::unflatten(best_x);
  const auto circuit = build_qaoa_circuit(hs, out.best_params);
  const auto clean = apply(circuit, zero_state(n));
  out.energy = expectation_diagonal(clean, diag) / scale;
  out.exact_probabilities = clean.probabilities();
  out.shots = opts.shots;
  if (noise && !noise->is_noiseless()) {
    out.distribution = sample_noisy(circuit, *noise, opts.shots, opts.trajectories, rng);
  } else {
    out.distribution = sample(clean, opts.shots, rng);
  }
  out.winner.bits = top_symmetric_pair(out.distribution);
  out.winner.value = cut_value(h, out.winner.bits);
  out.winner.energy = ising_energy(h, out.winner.bits);
  return out;
}

PartitionCentroids partition_to_centroids(const Coreset& c, const Bits& bits) {
  if (bits.size() != c.size()) throw std::invalid_argument("partition_to_centroids: length mismatch");
  const auto d = c.points.cols();
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(2, d);
  std::array<double, 2> w{0.0, 0.0};
  for (std::size_t i = 0; i < c.size(); ++i) {
    const int side = bits[i] ? 1 : 0;
    w[static_cast<std::size_t>(side)] += c.weights[i];
    sums.row(side) += c.weights[i] * c.points.row(static_cast<Eigen::Index>(i));
  }
  PartitionCentroids out;
  out.centroids.centers.resize(2, d);
  if (w[0] == 0.0 || w[1] == 0.0) {
    const Eigen::RowVectorXd mean = (sums.row(0) + sums.row(1)) / (w[0] + w[1]);
    out.centroids.centers.row(0) = mean;
    out.centroids.centers.row(1) = mean;
    out.degenerate = true;
    return out;
  }
  out.centroids.centers.row(0) = sums.row(0) / w[0];
  out.centroids.centers.row(1) = sums.row(1) / w[1];
  return out;
}

}  // namespace qcoreset
