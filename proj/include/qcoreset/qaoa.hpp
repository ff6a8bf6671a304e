/**
 * This code is part of qcoreset.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "qcoreset/clustering.hpp"
#include "qcoreset/coreset.hpp"
#include "qcoreset/ising.hpp"
#include "qcoreset/qsim.hpp"

namespace qcoreset {

//============================================================================
// Nelder-Mead
//============================================================================

struct NelderMeadOptions {
  std::size_t max_evals = 2000;
  double xtol = 1e-8;
  double ftol = 1e-10;
  double relative_step = 0.1;  // initial simplex: x0_k * (1 + relative_step)
  double zero_step = 0.00025;  // ... or this absolute step where x0_k == 0
};

struct NelderMeadResult {
  std::vector<double> x;
  double f = 0.0;
  std::size_t evals = 0;
  std::size_t iterations = 0;
};

using Objective = std::function<double(std::span<const double>)>;

// Downhill simplex with reflection 1, expansion 2, contraction 0.5 and
// shrink 0.5. Stops after max_evals evaluations, or once every vertex lies
// within xtol of the best (max-norm) and their values within ftol of its value.
NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0, const NelderMeadOptions& opts = {});

//============================================================================
// QAOA
//============================================================================

struct QaoaParams {
  std::vector<double> gammas;
  std::vector<double> betas;

  std::size_t depth() const noexcept { return gammas.size(); }
  // [gamma_1..gamma_p, beta_1..beta_p]
  std::vector<double> flatten() const;
  static QaoaParams unflatten(std::span<const double> x);
};

enum class RzzLowering { native, cnot };

// H on every qubit; per layer, RZZ(2 gamma_l c_ij) on every pair in (i, j)
// order followed by RX(2 beta_l) on every qubit. The cnot lowering emits each
// RZZ as CNOT(i,j) RZ_j(2 gamma_l c_ij) CNOT(i,j).
Circuit build_qaoa_circuit(const IsingHamiltonian& h, const QaoaParams& params,
                           RzzLowering lowering = RzzLowering::native);

enum class QaoaObjective { exact, sampled };

struct QaoaOptions {
  std::size_t depth = 1;
  std::size_t restarts = 10;
  std::size_t shots = 4096;
  // Independent noise trajectories used for the final sampling; shots are
  // spread evenly over them. 0 means one trajectory per shot.
  std::size_t trajectories = 0;
  QaoaObjective objective = QaoaObjective::exact;
  // Evaluate the optimizer objective under the sampling noise (averaged over
  // optimizer_trajectories trajectories with common random numbers).
  bool noise_in_optimizer = false;
  std::size_t optimizer_trajectories = 64;
  NelderMeadOptions nelder_mead{};
};

struct QaoaOutcome {
  QaoaParams best_params;
  double energy = 0.0;  // noise-free <H> at best_params, in the units of h
  Counts distribution;
  std::size_t shots = 0;
  CutSolution winner;   // canonical representative (bits[0] == 0)
  std::vector<double> exact_probabilities;  // noise-free |amplitude|^2
  std::vector<double> restart_energies;
  std::size_t evaluations = 0;

  // best params, energy, top-8 outcomes, winner bits and cut value
  nlohmann::json to_json() const;
};

// Restarts draw gamma uniform in [0, 2pi) and beta uniform in [0, pi) and
// minimise <H> with Nelder-Mead; the circuit is built from h scaled to unit
// max |c_ij|. The best restart's circuit is then sampled (under `noise`, if
// given), and the winner is the complement pair {b, ~b} with the largest
// combined count.
QaoaOutcome run_qaoa(const IsingHamiltonian& h, const QaoaOptions& opts, const std::optional<NoiseSpec>& noise,
                     Rng& rng);

// Complement pair with the largest combined count; ties go to the
// lexicographically smallest canonical string.
Bits top_symmetric_pair(const Counts& counts);

// Outcomes sorted by decreasing count (lexicographic on ties).
std::vector<std::pair<std::string, std::size_t>> ranked(const Counts& counts);

struct PartitionCentroids {
  Centroids centroids;  // row 0 = side with bit 0, row 1 = side with bit 1
  bool degenerate = false;
};

// Weighted means of each side in the coreset's original coordinates. If a
// side is empty, both rows hold the overall weighted mean and the result is
// flagged degenerate.
PartitionCentroids partition_to_centroids(const Coreset& c, const Bits& bits);

}  // namespace qcoreset
