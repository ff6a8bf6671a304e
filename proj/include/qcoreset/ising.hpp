/**
 * This code is part of qcoreset.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "qcoreset/coreset.hpp"

namespace qcoreset {

// Bit vector over qubits/coreset elements. Entry i is qubit i, printed as the
// i-th character from the left, and is the most significant bit of the
// corresponding basis-state index. Bit 0 maps to spin +1, bit 1 to spin -1.
using Bits = std::vector<int>;

std::uint64_t bits_to_index(const Bits& bits);
Bits index_to_bits(std::uint64_t index, std::size_t n);
std::string bits_to_string(const Bits& bits);
Bits bits_from_string(const std::string& s);
Bits complement(Bits bits);
// Representative of {b, ~b} with bits[0] == 0.
Bits canonical(Bits bits);

//============================================================================
// IsingHamiltonian
//============================================================================

// H = sum_{i<j} c_ij Z_i Z_j on a complete graph (every pair stored, possibly 0).
class IsingHamiltonian {
public:
  explicit IsingHamiltonian(std::size_t n_qubits);

  std::size_t n_qubits() const noexcept { return n_; }
  double coupling(std::size_t i, std::size_t j) const;
  void set_coupling(std::size_t i, std::size_t j, double value);

  // Sum of all c_ij.
  double total() const;
  // Largest |c_ij|.
  double max_abs() const;

  struct Term {
    std::size_t i;
    std::size_t j;
    double c;
  };
  // Sorted by (i, j).
  std::vector<Term> terms() const;

  IsingHamiltonian scaled(double factor) const;

  // {"n": m, "terms": [[i, j, c_ij], ...]}
  nlohmann::json to_json() const;
  static IsingHamiltonian from_json(const nlohmann::json& j);

private:
  std::size_t offset(std::size_t i, std::size_t j) const;

  std::size_t n_;
  std::vector<double> c_;
};

struct CutSolution {
  Bits bits;
  double value = 0.0;
  double energy = 0.0;
};

// Centers the coreset at its weighted mean and sets
// c_ij = -w_i w_j <x_i, x_j>. The cut value of a bipartition is then
// |sum_{i in S} w_i x_i|^2, which under equal cluster weights is the
// inter-cluster separation W+ W- |mu+ - mu-|^2 up to a constant factor.
IsingHamiltonian build_hamiltonian(const Coreset& c);

// sum_{i<j} c_ij (1 - z_i z_j) / 2
double cut_value(const IsingHamiltonian& h, const Bits& bits);

// sum_{i<j} c_ij z_i z_j  ( = total() - 2 cut_value )
double ising_energy(const IsingHamiltonian& h, const Bits& bits);

// Energy of every basis state, indexed by basis index.
std::vector<double> energy_table(const IsingHamiltonian& h);

inline constexpr std::size_t kMaxBruteForceQubits = 24;

// Exhaustive maximum cut over the 2^(m-1) strings with bits[0] == 0; ties go
// to the lexicographically smallest string.
CutSolution brute_force_maxcut(const IsingHamiltonian& h);

}  // namespace qcoreset
