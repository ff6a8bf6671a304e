/**
 * This code is part of qcoreset.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "qcoreset/ising.hpp"

#include <cmath>
#include <stdexcept>

namespace qcoreset {

std::uint64_t bits_to_index(const Bits& bits) {
  std::uint64_t idx = 0;
  for (int b : bits) idx = (idx << 1) | static_cast<std::uint64_t>(b & 1);
  return idx;
}

Bits index_to_bits(std::uint64_t index, std::size_t n) {
  Bits bits(n);
  for (std::size_t q = 0; q < n; ++q) bits[q] = static_cast<int>((index >> (n - 1 - q)) & 1u);
  return bits;
}

std::string bits_to_string(const Bits& bits) {
  std::string s;
  s.reserve(bits.size());
  for (int b : bits) s.push_back(b ? '1' : '0');
  return s;
}

Bits bits_from_string(const std::string& s) {
  Bits bits;
  bits.reserve(s.size());
  for (char ch : s) {
    if (ch != '0' && ch != '1') throw std::invalid_argument("bit string may only contain 0/1: " + s);
    bits.push_back(ch - '0');
  }
  return bits;
}

Bits complement(Bits bits) {
  for (int& b : bits) b ^= 1;
  return bits;
}

Bits canonical(Bits bits) {
  if (!bits.empty() && bits[0] == 1) return complement(std::move(bits));
  return bits;
}

IsingHamiltonian::IsingHamiltonian(std::size_t n_qubits) : n_(n_qubits), c_(n_qubits * (n_qubits - 1) / 2, 0.0) {
  if (n_qubits < 1) throw std::invalid_argument("IsingHamiltonian: need at least one qubit");
}

std::size_t IsingHamiltonian::offset(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  if (i == j || j >= n_) throw std::out_of_range("IsingHamiltonian: bad qubit pair");
  // row-major upper triangle
  return i * n_ - i * (i + 1) / 2 + (j - i - 1);
}

double IsingHamiltonian::coupling(std::size_t i, std::size_t j) const { return c_[offset(i, j)]; }

void IsingHamiltonian::set_coupling(std::size_t i, std::size_t j, double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("IsingHamiltonian: non-finite coupling");
  c_[offset(i, j)] = value;
}

double IsingHamiltonian::total() const {
  double t = 0.0;
  for (double v : c_) t += v;
  return t;
}

double IsingHamiltonian::max_abs() const {
  double t = 0.0;
  for (double v : c_) t = std::max(t, std::abs(v));
  return t;
}

std::vector<IsingHamiltonian::Term> IsingHamiltonian::terms() const {
  std::vector<Term> out;
  out.reserve(c_.size());
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j) out.push_back({i, j, coupling(i, j)});
  return out;
}

IsingHamiltonian IsingHamiltonian::scaled(double factor) const {
  IsingHamiltonian h = *this;
  for (double& v : h.c_) v *= factor;
  return h;
}

nlohmann::json IsingHamiltonian::to_json() const {
  nlohmann::json terms_json = nlohmann::json::array();
  for (const auto& t : terms()) terms_json.push_back({t.i, t.j, t.c});
  return {{"n", n_}, {"terms", terms_json}};
}

IsingHamiltonian IsingHamiltonian::from_json(const nlohmann::json& j) {
  IsingHamiltonian h(j.at("n").get<std::size_t>());
  for (const auto& t : j.at("terms")) h.set_coupling(t.at(0).get<std::size_t>(), t.at(1).get<std::size_t>(), t.at(2).get<double>());
  return h;
}

IsingHamiltonian build_hamiltonian(const Coreset& c) {
  const auto m = c.size();
  if (m < 2) throw std::invalid_argument("build_hamiltonian: need m >= 2");
  double wsum = 0.0;
  Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(c.points.cols());
  for (std::size_t i = 0; i < m; ++i) {
    wsum += c.weights[i];
    mean += c.weights[i] * c.points.row(static_cast<Eigen::Index>(i));
  }
  mean /= wsum;
  const Eigen::MatrixXd centered = c.points.rowwise() - mean;

  IsingHamiltonian h(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      h.set_coupling(i, j,
                     -c.weights[i] * c.weights[j] *
                         centered.row(static_cast<Eigen::Index>(i)).dot(centered.row(static_cast<Eigen::Index>(j))));
  return h;
}

namespace {

void check_len(const IsingHamiltonian& h, const Bits& bits) {
  if (bits.size() != h.n_qubits()) throw std::invalid_argument("bit vector length does not match qubit count");
}

}  // namespace

double cut_value(const IsingHamiltonian& h, const Bits& bits) {
  check_len(h, bits);
  double v = 0.0;
  for (std::size_t i = 0; i < bits.size(); ++i)
    for (std::size_t j = i + 1; j < bits.size(); ++j)
      if (bits[i] != bits[j]) v += h.coupling(i, j);
  return v;
}

double ising_energy(const IsingHamiltonian& h, const Bits& bits) {
  check_len(h, bits);
  double e = 0.0;
  for (std::size_t i = 0; i < bits.size(); ++i)
    for (std::size_t j = i + 1; j < bits.size(); ++j) e += (bits[i] == bits[j] ? 1.0 : -1.0) * h.coupling(i, j);
  return e;
}

std::vector<double> energy_table(const IsingHamiltonian& h) {
  const auto n = h.n_qubits();
  if (n > kMaxBruteForceQubits) throw std::invalid_argument("energy_table: too many qubits");
  const auto terms = h.terms();
  std::vector<double> table(std::size_t{1} << n, 0.0);
  for (std::uint64_t idx = 0; idx < table.size(); ++idx) {
    double e = 0.0;
    for (const auto& t : terms) {
      const auto bi = (idx >> (n - 1 - t.i)) & 1u;
      const auto bj = (idx >> (n - 1 - t.j)) & 1u;
      e += (bi == bj) ? t.c : -t.c;
    }
    table[idx] = e;
  }
  return table;
}

CutSolution brute_force_maxcut(const IsingHamiltonian& h) {
  const auto n = h.n_qubits();
  if (n > kMaxBruteForceQubits) throw std::invalid_argument("brute_force_maxcut: too many qubits");
  const auto terms = h.terms();
  // basis indices below 2^(n-1) are exactly the strings with bits[0] == 0,
  // and ascending index order is lexicographic order
  const std::uint64_t half = std::uint64_t{1} << (n - 1);
  std::uint64_t best_idx = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (std::uint64_t idx = 0; idx < half; ++idx) {
    double v = 0.0;
    for (const auto& t : terms)
      if (((idx >> (n - 1 - t.i)) ^ (idx >> (n - 1 - t.j))) & 1u) v += t.c;
    if (v > best) {
      best = v;
      best_idx = idx;
    }
  }
  CutSolution sol;
  sol.bits = index_to_bits(best_idx, n);
  sol.value = cut_value(h, sol.bits);
  sol.energy = ising_energy(h, sol.bits);
  return sol;
}

}  // namespace qcoreset
