/**
 * This code is part of qcoreset.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "qcoreset/qsim.hpp"

#include <cmath>
#include <algorithm>
#include <array>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace qcoreset {

namespace {

constexpr double kNormTol = 1e-10;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

void check_qubit_count(std::size_t n) {
  if (n < 1 || n > kMaxQubits)
    throw std::invalid_argument("qubit count must be in [1, " + std::to_string(kMaxQubits) + "]");
}

using Mat2 = std::array<Complex, 4>;  // row-major

void apply_1q(std::span<Complex> amp, std::size_t n, std::size_t q, const Mat2& m) {
  const auto mask = qubit_mask(n, q);
  for (std::uint64_t i = 0; i < amp.size(); ++i) {
    if (i & mask) continue;
    const Complex a0 = amp[i];
    const Complex a1 = amp[i | mask];
    amp[i] = m[0] * a0 + m[1] * a1;
    amp[i | mask] = m[2] * a0 + m[3] * a1;
  }
}

void apply_x(std::span<Complex> amp, std::size_t n, std::size_t q) {
  const auto mask = qubit_mask(n, q);
  for (std::uint64_t i = 0; i < amp.size(); ++i)
    if (!(i & mask)) std::swap(amp[i], amp[i | mask]);
}

void apply_unitary(std::span<Complex> amp, std::size_t n, const std::vector<std::size_t>& qubits,
                   const Eigen::MatrixXcd& u) {
  const std::size_t k = qubits.size();
  const std::size_t local = std::size_t{1} << k;
  std::vector<std::uint64_t> offsets(local, 0);
  std::uint64_t all = 0;
  for (std::size_t l = 0; l < local; ++l)
    for (std::size_t b = 0; b < k; ++b)
      if ((l >> (k - 1 - b)) & 1u) offsets[l] |= qubit_mask(n, qubits[b]);
  for (auto q : qubits) all |= qubit_mask(n, q);

  Eigen::VectorXcd in(static_cast<Eigen::Index>(local));
  for (std::uint64_t base = 0; base < amp.size(); ++base) {
    if (base & all) continue;
    for (std::size_t l = 0; l < local; ++l) in[static_cast<Eigen::Index>(l)] = amp[base | offsets[l]];
    const Eigen::VectorXcd out = u * in;
    for (std::size_t l = 0; l < local; ++l) amp[base | offsets[l]] = out[static_cast<Eigen::Index>(l)];
  }
}

}  // namespace

//----------------------------------------------------------------------------
// StateVector
//----------------------------------------------------------------------------

StateVector::StateVector(std::size_t n_qubits, std::vector<Complex> amplitudes)
    : n_(n_qubits), amp_(std::move(amplitudes)) {
  check_qubit_count(n_);
  if (amp_.size() != (std::size_t{1} << n_))
    throw std::invalid_argument("StateVector: amplitude count must be 2^n");
  if (std::abs(norm() - 1.0) > kNormTol)
    throw std::invalid_argument("StateVector: amplitudes are not normalized");
}

double StateVector::norm() const {
  double s = 0.0;
  for (const auto& a : amp_) s += std::norm(a);
  return std::sqrt(s);
}

std::vector<double> StateVector::probabilities() const {
  std::vector<double> p(amp_.size());
  for (std::size_t i = 0; i < amp_.size(); ++i) p[i] = std::norm(amp_[i]);
  return p;
}

Eigen::VectorXcd StateVector::to_eigen() const {
  return Eigen::Map<const Eigen::VectorXcd>(amp_.data(), static_cast<Eigen::Index>(amp_.size()));
}

StateVector zero_state(std::size_t n) {
  check_qubit_count(n);
  std::vector<Complex> amp(std::size_t{1} << n, Complex{0.0, 0.0});
  amp[0] = 1.0;
  return StateVector(n, std::move(amp));
}

StateVector basis_state(const Bits& bits) {
  check_qubit_count(bits.size());
  std::vector<Complex> amp(std::size_t{1} << bits.size(), Complex{0.0, 0.0});
  amp[bits_to_index(bits)] = 1.0;
  return StateVector(bits.size(), std::move(amp));
}

Complex inner(const StateVector& a, const StateVector& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("inner: dimension mismatch");
  Complex s{0.0, 0.0};
  for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

//----------------------------------------------------------------------------
// Circuit
//----------------------------------------------------------------------------

std::string to_string(GateKind kind) {
  switch (kind) {
    case GateKind::H: return "h";
    case GateKind::X: return "x";
    case GateKind::Y: return "y";
    case GateKind::Z: return "z";
    case GateKind::RX: return "rx";
    case GateKind::RZ: return "rz";
    case GateKind::CNOT: return "cnot";
    case GateKind::RZZ: return "rzz";
    case GateKind::CCX: return "ccx";
    case GateKind::Unitary: return "unitary";
  }
  return "?";
}

GateKind parse_gate_kind(const std::string& s) {
  for (auto k : NoiseSpec::all_gate_kinds())
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown gate kind: " + s);
}

Circuit::Circuit(std::size_t n_qubits) : n_(n_qubits) { check_qubit_count(n_qubits); }

Circuit& Circuit::add(Gate g) {
  std::size_t arity = 0;
  switch (g.kind) {
    case GateKind::H:
    case GateKind::X:
    case GateKind::Y:
    case GateKind::Z:
    case GateKind::RX:
    case GateKind::RZ: arity = 1; break;
    case GateKind::CNOT:
    case GateKind::RZZ: arity = 2; break;
    case GateKind::CCX: arity = 3; break;
    case GateKind::Unitary: arity = g.qubits.size(); break;
  }
  if (arity == 0 || g.qubits.size() != arity)
    throw std::invalid_argument("Circuit: wrong operand count for " + to_string(g.kind));
  for (std::size_t a = 0; a < g.qubits.size(); ++a) {
    if (g.qubits[a] >= n_) throw std::out_of_range("Circuit: qubit index out of range");
    for (std::size_t b = a + 1; b < g.qubits.size(); ++b)
      if (g.qubits[a] == g.qubits[b]) throw std::invalid_argument("Circuit: repeated operand");
  }
  if (g.kind == GateKind::Unitary) {
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << arity);
    if (g.matrix.rows() != dim || g.matrix.cols() != dim)
      throw std::invalid_argument("Circuit: unitary size does not match operand count");
  }
  gates_.push_back(std::move(g));
  return *this;
}

Circuit& Circuit::unitary(std::vector<std::size_t> qubits, Eigen::MatrixXcd m) {
  return add({GateKind::Unitary, std::move(qubits), 0.0, std::move(m)});
}

std::size_t Circuit::count(GateKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(gates_.begin(), gates_.end(), [&](const Gate& g) { return g.kind == kind; }));
}

nlohmann::json Circuit::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& g : gates_) {
    nlohmann::json j{{"gate", to_string(g.kind)}, {"qubits", g.qubits}};
    if (g.kind == GateKind::RX || g.kind == GateKind::RZ || g.kind == GateKind::RZZ) j["param"] = g.param;
    out.push_back(std::move(j));
  }
  return out;
}

void apply_gate(const Gate& g, StateVector& s) {
  const auto n = s.n_qubits();
  auto amp = s.mutable_amplitudes();
  const auto& q = g.qubits;
  for (auto idx : q)
    if (idx >= n) throw std::out_of_range("apply: qubit index out of range");
  const Complex i1{0.0, 1.0};
  switch (g.kind) {
    case GateKind::H:
      apply_1q(amp, n, q[0], {kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2});
      break;
    case GateKind::X:
      apply_x(amp, n, q[0]);
      break;
    case GateKind::Y:
      apply_1q(amp, n, q[0], {0.0, -i1, i1, 0.0});
      break;
    case GateKind::Z:
      apply_1q(amp, n, q[0], {1.0, 0.0, 0.0, -1.0});
      break;
    case GateKind::RX: {
      const double c = std::cos(g.param / 2), sn = std::sin(g.param / 2);
      apply_1q(amp, n, q[0], {c, -i1 * sn, -i1 * sn, c});
      break;
    }
    case GateKind::RZ: {
      const Complex e0 = std::exp(-i1 * (g.param / 2));
      apply_1q(amp, n, q[0], {e0, 0.0, 0.0, std::conj(e0)});
      break;
    }
    case GateKind::CNOT: {
      const auto cm = qubit_mask(n, q[0]), tm = qubit_mask(n, q[1]);
      for (std::uint64_t i = 0; i < amp.size(); ++i)
        if ((i & cm) && !(i & tm)) std::swap(amp[i], amp[i | tm]);
      break;
    }
    case GateKind::RZZ: {
      // even parity picks up exp(-i t/2), odd parity exp(+i t/2)
      const auto am = qubit_mask(n, q[0]), bm = qubit_mask(n, q[1]);
      const Complex even = std::exp(-i1 * (g.param / 2));
      const Complex odd = std::conj(even);
      for (std::uint64_t i = 0; i < amp.size(); ++i)
        amp[i] *= (((i & am) != 0) != ((i & bm) != 0)) ? odd : even;
      break;
    }
    case GateKind::CCX: {
      const auto c0 = qubit_mask(n, q[0]), c1 = qubit_mask(n, q[1]), tm = qubit_mask(n, q[2]);
      for (std::uint64_t i = 0; i < amp.size(); ++i)
        if ((i & c0) && (i & c1) && !(i & tm)) std::swap(amp[i], amp[i | tm]);
      break;
    }
    case GateKind::Unitary:
      apply_unitary(amp, n, q, g.matrix);
      break;
  }
}

StateVector apply(const Circuit& c, StateVector s) {
  if (c.n_qubits() != s.n_qubits()) throw std::invalid_argument("apply: qubit count mismatch");
  for (const auto& g : c.gates()) apply_gate(g, s);
  return s;
}

//----------------------------------------------------------------------------
// Noise
//----------------------------------------------------------------------------

std::set<GateKind> NoiseSpec::all_gate_kinds() {
  return {GateKind::H,    GateKind::X,   GateKind::Y,   GateKind::Z,   GateKind::RX,
          GateKind::RZ,   GateKind::CNOT, GateKind::RZZ, GateKind::CCX, GateKind::Unitary};
}

void NoiseSpec::validate() const {
  if (!(depolarizing_rate >= 0.0 && depolarizing_rate <= 1.0))
    throw std::invalid_argument("NoiseSpec: depolarizing_rate outside [0,1]");
  if (!(bitflip_rate >= 0.0 && bitflip_rate <= 1.0))
    throw std::invalid_argument("NoiseSpec: bitflip_rate outside [0,1]");
}

std::string NoiseSpec::label() const {
  if (is_noiseless()) return "none";
  std::ostringstream out;
  if (depolarizing_rate > 0.0) out << (pauli_xyz ? "pauli:" : "depol:") << depolarizing_rate;
  if (bitflip_rate > 0.0) out << (depolarizing_rate > 0.0 ? "+" : "") << "bitflip:" << bitflip_rate;
  return out.str();
}

NoiseSpec parse_noise(const std::string& text) {
  NoiseSpec spec;
  if (text == "none" || text.empty()) return spec;
  std::stringstream parts(text);
  std::string part;
  while (std::getline(parts, part, '+')) {
    const auto colon = part.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("bad noise term: " + part);
    const std::string kind = part.substr(0, colon);
    double rate = 0.0;
    try {
      rate = std::stod(part.substr(colon + 1));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad noise rate in: " + part);
    }
    if (kind == "depol") {
      spec.depolarizing_rate = rate;
    } else if (kind == "pauli") {
      spec.depolarizing_rate = rate;
      spec.pauli_xyz = true;
    } else if (kind == "bitflip") {
      spec.bitflip_rate = rate;
    } else {
      throw std::invalid_argument("unknown noise kind: " + kind);
    }
  }
  spec.validate();
  return spec;
}

StateVector apply_noisy(const Circuit& c, StateVector s, const NoiseSpec& noise, Rng& rng) {
  if (c.n_qubits() != s.n_qubits()) throw std::invalid_argument("apply_noisy: qubit count mismatch");
  noise.validate();
  const auto n = s.n_qubits();
  auto amp = s.mutable_amplitudes();
  const Complex i1{0.0, 1.0};
  for (const auto& g : c.gates()) {
    apply_gate(g, s);
    if (noise.depolarizing_rate == 0.0 || !noise.gate_filter.contains(g.kind)) continue;
    for (auto q : g.qubits) {
      if (!bernoulli(rng, noise.depolarizing_rate)) continue;
      if (!noise.pauli_xyz) {
        apply_x(amp, n, q);
        continue;
      }
      switch (uniform_index(rng, 3)) {
        case 0: apply_x(amp, n, q); break;
        case 1: apply_1q(amp, n, q, {0.0, -i1, i1, 0.0}); break;
        default: apply_1q(amp, n, q, {1.0, 0.0, 0.0, -1.0}); break;
      }
    }
  }
  if (noise.bitflip_rate > 0.0)
    for (std::size_t q = 0; q < n; ++q)
      if (bernoulli(rng, noise.bitflip_rate)) apply_x(amp, n, q);
  return s;
}

//----------------------------------------------------------------------------
// Observables and measurement
//----------------------------------------------------------------------------

double expectation_diagonal(const StateVector& s, std::span<const double> diagonal) {
  if (diagonal.size() != s.dim()) throw std::invalid_argument("expectation: size mismatch");
  double e = 0.0;
  for (std::size_t i = 0; i < s.dim(); ++i) e += std::norm(s[i]) * diagonal[i];
  return e;
}

double expectation_ising(const StateVector& s, const IsingHamiltonian& h) {
  if (h.n_qubits() != s.n_qubits()) throw std::invalid_argument("expectation_ising: qubit count mismatch");
  return expectation_diagonal(s, energy_table(h));
}

Counts sample_probabilities(std::span<const double> probs, std::size_t n_qubits, std::size_t shots, Rng& rng) {
  if (shots < 1) throw std::invalid_argument("sample: shots must be >= 1");
  std::vector<double> cumulative(probs.size());
  std::partial_sum(probs.begin(), probs.end(), cumulative.begin());
  std::vector<std::size_t> hits(probs.size(), 0);
  for (std::size_t s = 0; s < shots; ++s) ++hits[draw_from_cumulative(rng, cumulative)];
  Counts counts;
  for (std::size_t i = 0; i < hits.size(); ++i)
    if (hits[i]) counts.emplace(bits_to_string(index_to_bits(i, n_qubits)), hits[i]);
  return counts;
}

Counts sample(const StateVector& s, std::size_t shots, Rng& rng) {
  const auto p = s.probabilities();
  return sample_probabilities(p, s.n_qubits(), shots, rng);
}

nlohmann::json counts_to_json(const Counts& c) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : c) j[k] = v;
  return j;
}

//----------------------------------------------------------------------------
// DensityMatrix
//----------------------------------------------------------------------------

DensityMatrix::DensityMatrix(std::size_t n_qubits, Eigen::MatrixXcd rho) : n_(n_qubits), rho_(std::move(rho)) {
  check_qubit_count(n_);
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n_);
  if (rho_.rows() != dim || rho_.cols() != dim)
    throw std::invalid_argument("DensityMatrix: matrix must be 2^n x 2^n");
  if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > kNormTol)
    throw std::invalid_argument("DensityMatrix: matrix is not Hermitian");
  if (std::abs(rho_.trace() - Complex{1.0, 0.0}) > kNormTol)
    throw std::invalid_argument("DensityMatrix: trace is not 1");
}

DensityMatrix::DensityMatrix(const StateVector& pure) : n_(pure.n_qubits()) {
  const Eigen::VectorXcd v = pure.to_eigen();
  rho_ = v * v.adjoint();
}

DensityMatrix DensityMatrix::mixture(std::span<const StateVector> states) {
  if (states.empty()) throw std::invalid_argument("DensityMatrix::mixture: no states");
  const auto n = states.front().n_qubits();
  const auto dim = static_cast<Eigen::Index>(states.front().dim());
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& s : states) {
    if (s.n_qubits() != n) throw std::invalid_argument("DensityMatrix::mixture: mixed qubit counts");
    const Eigen::VectorXcd v = s.to_eigen();
    rho.noalias() += v * v.adjoint();
  }
  rho /= static_cast<double>(states.size());
  // restore exact Hermiticity lost to rounding
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityMatrix(n, std::move(rho));
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t n) {
  check_qubit_count(n);
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
  return DensityMatrix(n, Eigen::MatrixXcd::Identity(dim, dim) / static_cast<double>(dim));
}

double DensityMatrix::purity() const { return (rho_ * rho_).trace().real(); }

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

std::vector<double> DensityMatrix::probabilities() const {
  std::vector<double> p(dim());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = rho_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
  return p;
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep) {
  const auto n = rho.n_qubits();
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
  for (std::size_t a = 0; a < keep.size(); ++a) {
    if (keep[a] >= n) throw std::out_of_range("partial_trace: qubit index out of range");
    if (a > 0 && keep[a] <= keep[a - 1]) throw std::invalid_argument("partial_trace: keep must be strictly increasing");
  }
  const std::size_t k = keep.size();
  std::vector<std::size_t> traced;
  for (std::size_t q = 0, a = 0; q < n; ++q) {
    if (a < k && keep[a] == q) {
      ++a;
      continue;
    }
    traced.push_back(q);
  }
  const std::size_t out_dim = std::size_t{1} << k;
  const std::size_t env_dim = std::size_t{1} << traced.size();
  // full index of (kept local index, environment index)
  auto full_index = [&](std::size_t local, std::size_t env) {
    std::uint64_t idx = 0;
    for (std::size_t b = 0; b < k; ++b)
      if ((local >> (k - 1 - b)) & 1u) idx |= qubit_mask(n, keep[b]);
    for (std::size_t b = 0; b < traced.size(); ++b)
      if ((env >> (traced.size() - 1 - b)) & 1u) idx |= qubit_mask(n, traced[b]);
    return static_cast<Eigen::Index>(idx);
  };
  std::vector<std::vector<Eigen::Index>> table(out_dim, std::vector<Eigen::Index>(env_dim));
  for (std::size_t l = 0; l < out_dim; ++l)
    for (std::size_t e = 0; e < env_dim; ++e) table[l][e] = full_index(l, e);

  const auto& m = rho.matrix();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(out_dim), static_cast<Eigen::Index>(out_dim));
  for (std::size_t i = 0; i < out_dim; ++i)
    for (std::size_t j = 0; j < out_dim; ++j) {
      Complex acc{0.0, 0.0};
      for (std::size_t e = 0; e < env_dim; ++e) acc += m(table[i][e], table[j][e]);
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = acc;
    }
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityMatrix(k, std::move(out));
}

DensityMatrix bitflip_channel(const DensityMatrix& rho, double rate) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw std::invalid_argument("bitflip_channel: rate must be in [0, 1]");
  const auto n = rho.n_qubits();
  const auto dim = static_cast<Eigen::Index>(rho.dim());
  Eigen::MatrixXcd m = rho.matrix();
  for (std::size_t q = 0; q < n; ++q) {
    const auto mask = static_cast<Eigen::Index>(qubit_mask(n, q));
    Eigen::MatrixXcd flipped(dim, dim);
    for (Eigen::Index a = 0; a < dim; ++a)
      for (Eigen::Index b = 0; b < dim; ++b) flipped(a, b) = m(a ^ mask, b ^ mask);
    m = (1.0 - rate) * m + rate * flipped;
  }
  return DensityMatrix(n, std::move(m));
}

double fidelity(const DensityMatrix& rho, const StateVector& target) {
  if (rho.dim() != target.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
  const Eigen::VectorXcd t = target.to_eigen();
  return (t.adjoint() * rho.matrix() * t)(0, 0).real();
}

}  // namespace qcoreset
