/**
 * This code is part of qcoreset.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <cmath>
#include <numbers>

#include "doctest.h"

#include "qcoreset/qsim.hpp"

using namespace qcoreset;

namespace {

const Complex I1{0.0, 1.0};

StateVector random_state(std::size_t n, Rng& rng) {
  std::vector<Complex> a(std::size_t{1} << n);
  double norm = 0.0;
  for (auto& z : a) {
    z = {standard_normal(rng), standard_normal(rng)};
    norm += std::norm(z);
  }
  for (auto& z : a) z /= std::sqrt(norm);
  return StateVector(n, std::move(a));
}

double max_diff(const StateVector& a, const StateVector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

Eigen::MatrixXcd single(GateKind k, double t) {
  Eigen::Matrix2cd g;
  const double c = std::cos(t / 2), s = std::sin(t / 2);
  switch (k) {
    case GateKind::H: g << 1, 1, 1, -1; g /= std::sqrt(2.0); break;
    case GateKind::X: g << 0, 1, 1, 0; break;
    case GateKind::Y: g << 0, -I1, I1, 0; break;
    case GateKind::Z: g << 1, 0, 0, -1; break;
    case GateKind::RX: g << c, -I1 * s, -I1 * s, c; break;
    case GateKind::RZ: g << std::exp(-I1 * t / 2.0), 0, 0, std::exp(I1 * t / 2.0); break;
    default: throw std::logic_error("not a single-qubit gate");
  }
  return g;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Full 2^n matrix of a gate, built from Kronecker products or basis-index rules.
Eigen::MatrixXcd oracle(const Gate& g, std::size_t n) {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
  auto bit = [n](Eigen::Index idx, std::size_t q) { return static_cast<int>((idx >> (n - 1 - q)) & 1); };
  switch (g.kind) {
    case GateKind::CNOT:
    case GateKind::CCX: {
      Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(dim, dim);
      for (Eigen::Index c = 0; c < dim; ++c) {
        bool on = true;
        for (std::size_t k = 0; k + 1 < g.qubits.size(); ++k) on = on && bit(c, g.qubits[k]);
        const Eigen::Index r = on ? (c ^ (Eigen::Index{1} << (n - 1 - g.qubits.back()))) : c;
        u(r, c) = 1.0;
      }
      return u;
    }
    case GateKind::RZZ: {
      Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(dim, dim);
      for (Eigen::Index c = 0; c < dim; ++c) {
        const double zz = bit(c, g.qubits[0]) == bit(c, g.qubits[1]) ? 1.0 : -1.0;
        u(c, c) = std::exp(-I1 * g.param * zz / 2.0);
      }
      return u;
    }
    default: {
      const auto q = g.qubits[0];
      const auto left = Eigen::MatrixXcd::Identity(Eigen::Index{1} << q, Eigen::Index{1} << q);
      const auto right = Eigen::MatrixXcd::Identity(Eigen::Index{1} << (n - 1 - q), Eigen::Index{1} << (n - 1 - q));
      return kron(kron(left, single(g.kind, g.param)), right);
    }
  }
}

StateVector oracle_apply(const Gate& g, const StateVector& s) {
  const Eigen::VectorXcd out = oracle(g, s.n_qubits()) * s.to_eigen();
  return StateVector(s.n_qubits(), std::vector<Complex>(out.data(), out.data() + out.size()));
}

}  // namespace

TEST_CASE("zero_state and basis_state") {
  const auto one = zero_state(1);
  CHECK(one.dim() == 2);
  CHECK(one[0] == Complex{1, 0});
  CHECK(one[1] == Complex{0, 0});
  const auto two = zero_state(2);
  CHECK(two.dim() == 4);
  CHECK(two[0] == Complex{1, 0});
  CHECK_THROWS(zero_state(15));
  CHECK_THROWS(zero_state(0));
  CHECK(basis_state({1, 0})[2] == Complex{1, 0});
  CHECK_THROWS(StateVector(1, {1.0, 1.0}));
}

TEST_CASE("gate examples") {
  const double r = 1.0 / std::sqrt(2.0);
  auto s = apply(Circuit(1).h(0), zero_state(1));
  CHECK(std::abs(s[0] - r) < 1e-15);
  CHECK(std::abs(s[1] - r) < 1e-15);

  s = apply(Circuit(2).cnot(0, 1), basis_state({1, 0}));
  CHECK(std::abs(s[3] - 1.0) < 1e-15);

  const double theta = 0.7;
  s = apply(Circuit(2).rzz(0, 1, theta), basis_state({0, 1}));
  CHECK(std::abs(s[1] - std::exp(I1 * theta / 2.0)) < 1e-15);
  s = apply(Circuit(2).rzz(0, 1, theta), basis_state({1, 1}));
  CHECK(std::abs(s[3] - std::exp(-I1 * theta / 2.0)) < 1e-15);
}

TEST_CASE("every gate kind matches its matrix oracle") {
  Rng rng(1);
  const std::size_t n = 4;
  for (int t = 0; t < 20; ++t) {
    const auto s = random_state(n, rng);
    const double th = uniform(rng, -4.0, 4.0);
    const std::vector<Gate> gates{{GateKind::H, {1}},       {GateKind::X, {3}},        {GateKind::Y, {0}},
                                  {GateKind::Z, {2}},       {GateKind::RX, {1}, th},   {GateKind::RZ, {3}, th},
                                  {GateKind::CNOT, {2, 0}}, {GateKind::RZZ, {3, 1}, th}, {GateKind::CCX, {3, 0, 2}}};
    for (const auto& g : gates) {
      auto got = s;
      apply_gate(g, got);
      CHECK(max_diff(got, oracle_apply(g, s)) < 1e-12);
    }
  }
}

TEST_CASE("custom unitaries use the first listed qubit as most significant") {
  Rng rng(2);
  const auto s = random_state(3, rng);
  // CNOT as a 4x4 matrix on (control, target) = (2, 0)
  Eigen::MatrixXcd cnot = Eigen::MatrixXcd::Zero(4, 4);
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
  const auto a = apply(Circuit(3).unitary({2, 0}, cnot), s);
  const auto b = apply(Circuit(3).cnot(2, 0), s);
  CHECK(max_diff(a, b) < 1e-15);
  CHECK_THROWS(Circuit(3).unitary({0, 1}, Eigen::MatrixXcd::Identity(2, 2)));
}

TEST_CASE("gates undo themselves with negated parameters") {
  Rng rng(3);
  const auto s = random_state(3, rng);
  const double th = 1.234;
  const std::vector<std::pair<Gate, Gate>> pairs{
      {{GateKind::H, {0}}, {GateKind::H, {0}}},
      {{GateKind::X, {1}}, {GateKind::X, {1}}},
      {{GateKind::Y, {2}}, {GateKind::Y, {2}}},
      {{GateKind::Z, {0}}, {GateKind::Z, {0}}},
      {{GateKind::CNOT, {0, 2}}, {GateKind::CNOT, {0, 2}}},
      {{GateKind::CCX, {1, 2, 0}}, {GateKind::CCX, {1, 2, 0}}},
      {{GateKind::RX, {1}, th}, {GateKind::RX, {1}, -th}},
      {{GateKind::RZ, {2}, th}, {GateKind::RZ, {2}, -th}},
      {{GateKind::RZZ, {0, 2}, th}, {GateKind::RZZ, {0, 2}, -th}}};
  for (const auto& [g, inv] : pairs) {
    auto t = s;
    apply_gate(g, t);
    apply_gate(inv, t);
    CHECK(max_diff(t, s) < 1e-10);
  }
}

TEST_CASE("norm is preserved over long random circuits") {
  Rng rng(4);
  const std::size_t n = 6;
  Circuit c(n);
  for (int g = 0; g < 100; ++g) {
    const auto q = uniform_index(rng, n);
    auto p = uniform_index(rng, n);
    while (p == q) p = uniform_index(rng, n);
    switch (uniform_index(rng, 5)) {
      case 0: c.h(q); break;
      case 1: c.rx(q, uniform(rng, -3, 3)); break;
      case 2: c.rz(q, uniform(rng, -3, 3)); break;
      case 3: c.cnot(q, p); break;
      default: c.rzz(q, p, uniform(rng, -3, 3)); break;
    }
  }
  const auto out = apply(c, random_state(n, rng));
  CHECK(std::abs(out.norm() - 1.0) < 1e-10);
}

TEST_CASE("circuit validation and bookkeeping") {
  Circuit c(3);
  CHECK_THROWS(c.h(3));
  CHECK_THROWS(c.cnot(1, 1));
  CHECK_THROWS(c.ccx(0, 1, 1));
  CHECK_THROWS(c.add({GateKind::CNOT, {0}}));
  c.h(0).h(1).cnot(0, 2).rzz(1, 2, 0.5);
  CHECK(c.count(GateKind::H) == 2);
  CHECK(c.count(GateKind::RZZ) == 1);
  const auto j = c.to_json();
  CHECK(j.size() == 4);
  CHECK(j[3]["gate"] == "rzz");
  CHECK(j[3]["qubits"] == nlohmann::json::array({1, 2}));
  CHECK(parse_gate_kind(to_string(GateKind::CCX)) == GateKind::CCX);
  CHECK_THROWS(apply(Circuit(2).h(0), zero_state(3)));
}

TEST_CASE("apply_noisy") {
  Rng rng(5);
  Circuit c(3);
  c.h(0).cnot(0, 1).rzz(1, 2, 0.3).rx(2, 1.1);
  SUBCASE("zero rates equal the noiseless result exactly") {
    const auto s = random_state(3, rng);
    const auto a = apply(c, s);
    const auto b = apply_noisy(c, s, NoiseSpec::none(), rng);
    for (std::size_t i = 0; i < a.dim(); ++i) CHECK(a[i] == b[i]);
  }
  SUBCASE("forced insertion after a filtered gate") {
    NoiseSpec n = NoiseSpec::depolarizing(1.0);
    n.gate_filter = {GateKind::H};
    const auto out = apply_noisy(Circuit(1).h(0), zero_state(1), n, rng);
    const auto expect = apply(Circuit(1).h(0).x(0), zero_state(1));
    CHECK(max_diff(out, expect) < 1e-15);
    // gates outside the filter are untouched
    const auto untouched = apply_noisy(Circuit(1).x(0), zero_state(1), n, rng);
    CHECK(std::abs(untouched[1] - 1.0) < 1e-15);
  }
  SUBCASE("bit flips at rate 0.5 average <Z> to zero") {
    const int k = 10000;
    double z = 0.0;
    for (int t = 0; t < k; ++t) {
      const auto out = apply_noisy(Circuit(1), zero_state(1), NoiseSpec::bitflip(0.5), rng);
      z += std::norm(out[0]) - std::norm(out[1]);
    }
    CHECK(std::abs(z / k) < 0.05);
  }
  SUBCASE("trajectory average converges to the exact bit-flip channel") {
    const auto clean = apply(c, zero_state(3));
    const auto exact = bitflip_channel(DensityMatrix(clean), 0.2).probabilities();
    const int k = 20000;
    std::vector<double> mean(8, 0.0);
    for (int t = 0; t < k; ++t) {
      const auto p = apply_noisy(c, zero_state(3), NoiseSpec::bitflip(0.2), rng).probabilities();
      for (std::size_t i = 0; i < 8; ++i) mean[i] += p[i] / k;
    }
    for (std::size_t i = 0; i < 8; ++i) CHECK(std::abs(mean[i] - exact[i]) < 4.0 * 0.5 / std::sqrt(k));
  }
  SUBCASE("same seed, same trajectory") {
    Rng a(42), b(42);
    const auto n = NoiseSpec::depolarizing(0.3);
    CHECK(max_diff(apply_noisy(c, zero_state(3), n, a), apply_noisy(c, zero_state(3), n, b)) == 0.0);
  }
}

TEST_CASE("noise specs parse and print") {
  CHECK(parse_noise("none").is_noiseless());
  const auto n = parse_noise("depol:0.02+bitflip:0.1");
  CHECK(n.depolarizing_rate == 0.02);
  CHECK(n.bitflip_rate == 0.1);
  CHECK(n.label() == "depol:0.02+bitflip:0.1");
  CHECK(parse_noise("pauli:0.05").pauli_xyz);
  CHECK_THROWS(parse_noise("depol:1.5").validate());
  CHECK_THROWS(parse_noise("amp:0.1"));
  CHECK_THROWS(parse_noise("depol"));
}

TEST_CASE("expectation_ising") {
  IsingHamiltonian h(3);
  h.set_coupling(0, 1, 1.5);
  h.set_coupling(0, 2, -2.0);
  h.set_coupling(1, 2, 0.25);
  CHECK(expectation_ising(zero_state(3), h) == doctest::Approx(h.total()));
  Circuit plus(3);
  plus.h(0).h(1).h(2);
  CHECK(std::abs(expectation_ising(apply(plus, zero_state(3)), h)) < 1e-12);
  for (std::uint64_t b = 0; b < 8; ++b) {
    const auto bits = index_to_bits(b, 3);
    CHECK(expectation_ising(basis_state(bits), h) == doctest::Approx(ising_energy(h, bits)));
  }
  Rng rng(6);
  const auto s = random_state(3, rng);
  CHECK(expectation_diagonal(s, energy_table(h)) == doctest::Approx(expectation_ising(s, h)).epsilon(1e-12));
  CHECK_THROWS(expectation_ising(zero_state(2), h));
}

TEST_CASE("sampling") {
  Rng rng(7);
  auto counts = sample(basis_state({1, 0, 1}), 500, rng);
  CHECK(counts.size() == 1);
  CHECK(counts["101"] == 500);

  counts = sample(apply(Circuit(1).h(0), zero_state(1)), 100000, rng);
  CHECK(std::abs(static_cast<double>(counts["0"]) - 50000.0) < 700.0);
  CHECK(counts["0"] + counts["1"] == 100000);

  Rng a(8), b(8);
  const auto s = apply(Circuit(2).h(0).cnot(0, 1), zero_state(2));
  CHECK(sample(s, 1000, a) == sample(s, 1000, b));
  for (const auto& [k, v] : sample(s, 1000, a)) CHECK(k.size() == 2);
  CHECK(counts_to_json(counts)["1"] == counts["1"]);
}

TEST_CASE("density matrices and partial trace") {
  Rng rng(9);
  SUBCASE("product state reduces to the pure factor") {
    const auto psi = random_state(2, rng);
    std::vector<Complex> amp(8, 0.0);
    for (std::size_t i = 0; i < 4; ++i) amp[i] = psi[i];  // |0> (x) |psi>
    const DensityMatrix rho(StateVector(3, amp));
    const std::vector<std::size_t> keep{1, 2};
    const auto red = partial_trace(rho, keep);
    CHECK((red.matrix() - DensityMatrix(psi).matrix()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(red.purity() - 1.0) < 1e-9);
  }
  SUBCASE("Bell state reduces to the maximally mixed state") {
    const DensityMatrix bell(apply(Circuit(2).h(0).cnot(0, 1), zero_state(2)));
    for (std::size_t q = 0; q < 2; ++q) {
      const std::vector<std::size_t> keep{q};
      const auto red = partial_trace(bell, keep);
      CHECK((red.matrix() - DensityMatrix::maximally_mixed(1).matrix()).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  SUBCASE("keeping every qubit is the identity") {
    const DensityMatrix rho(random_state(3, rng));
    const std::vector<std::size_t> keep{0, 1, 2};
    CHECK((partial_trace(rho, keep).matrix() - rho.matrix()).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("trace and Hermiticity are preserved on mixed inputs") {
    std::vector<StateVector> states;
    for (int i = 0; i < 4; ++i) states.push_back(random_state(4, rng));
    const auto rho = DensityMatrix::mixture(states);
    const std::vector<std::size_t> keep{0, 2};
    const auto red = partial_trace(rho, keep);
    CHECK(std::abs(red.trace() - 1.0) < 1e-10);
    CHECK((red.matrix() - red.matrix().adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(red.min_eigenvalue() > -1e-10);
  }
  SUBCASE("bad arguments") {
    const DensityMatrix rho(random_state(2, rng));
    const std::vector<std::size_t> empty{}, unordered{1, 0}, out_of_range{2};
    CHECK_THROWS(partial_trace(rho, empty));
    CHECK_THROWS(partial_trace(rho, unordered));
    CHECK_THROWS(partial_trace(rho, out_of_range));
    CHECK_THROWS(DensityMatrix(1, Eigen::MatrixXcd::Identity(2, 2)));
  }
}

TEST_CASE("fidelity") {
  Rng rng(10);
  const auto t = random_state(3, rng);
  CHECK(fidelity(DensityMatrix(t), t) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(fidelity(DensityMatrix(basis_state({0, 1})), basis_state({1, 0}))) < 1e-15);
  CHECK(fidelity(DensityMatrix::maximally_mixed(3), t) == doctest::Approx(0.125).epsilon(1e-12));
  CHECK_THROWS(fidelity(DensityMatrix::maximally_mixed(2), t));
}

TEST_CASE("exact bit-flip channel") {
  Rng rng(11);
  const DensityMatrix rho(random_state(2, rng));
  CHECK((bitflip_channel(rho, 0.0).matrix() - rho.matrix()).cwiseAbs().maxCoeff() < 1e-15);
  const auto full = bitflip_channel(DensityMatrix(basis_state({0, 1})), 1.0);
  CHECK(std::abs(full.matrix()(2, 2) - 1.0) < 1e-15);
  const auto half = bitflip_channel(rho, 0.5);
  CHECK((half.matrix() - DensityMatrix::maximally_mixed(2).matrix()).cwiseAbs().maxCoeff() > 0.0);
  const auto p = bitflip_channel(DensityMatrix(zero_state(2)), 0.5).probabilities();
  for (double v : p) CHECK(v == doctest::Approx(0.25));
}
