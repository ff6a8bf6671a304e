/**
 * This code is part of qcoreset.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "qcoreset/qae.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <stdexcept>

namespace qcoreset {

void QnnLayerSpec::validate() const {
  if (sizes.size() < 2) throw std::invalid_argument("QnnLayerSpec: need at least two layers");
  for (auto s : sizes)
    if (s < 1) throw std::invalid_argument("QnnLayerSpec: layer sizes must be >= 1");
  if (sizes.front() != sizes.back()) throw std::invalid_argument("QnnLayerSpec: input and output sizes differ");
  for (std::size_t t = 0; t + 1 < sizes.size(); ++t)
    if (sizes[t] + sizes[t + 1] > kMaxQubits) throw std::invalid_argument("QnnLayerSpec: layer pair too wide");
}

std::size_t qae_qubit_budget(const QnnLayerSpec& spec) {
  spec.validate();
  std::size_t width = 0;
  for (std::size_t t = 0; t + 1 < spec.sizes.size(); ++t) width = std::max(width, spec.sizes[t] + spec.sizes[t + 1]);
  return 1 + spec.sizes.front() + width;
}

namespace {

std::size_t generator_size(std::size_t g) { return (std::size_t{1} << (2 * g)) - 1; }

}  // namespace

QnnNetwork QnnNetwork::zeros(const QnnLayerSpec& spec) {
  spec.validate();
  QnnNetwork net{spec, {}};
  for (std::size_t t = 0; t < spec.transitions(); ++t) {
    const auto len = static_cast<Eigen::Index>(generator_size(spec.neuron_qubits(t)));
    net.coefficients.emplace_back(spec.sizes[t + 1], Eigen::VectorXd::Zero(len));
  }
  return net;
}

QnnNetwork QnnNetwork::random(const QnnLayerSpec& spec, Rng& rng, double stddev) {
  auto net = zeros(spec);
  for (auto& layer : net.coefficients)
    for (auto& k : layer)
      for (auto& v : k) v = stddev * standard_normal(rng);
  return net;
}

std::size_t QnnNetwork::parameter_count() const {
  std::size_t total = 0;
  for (const auto& layer : coefficients)
    for (const auto& k : layer) total += static_cast<std::size_t>(k.size());
  return total;
}

std::vector<double> QnnNetwork::flat() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const auto& layer : coefficients)
    for (const auto& k : layer) out.insert(out.end(), k.begin(), k.end());
  return out;
}

void QnnNetwork::set_flat(std::span<const double> values) {
  if (values.size() != parameter_count()) throw std::invalid_argument("QnnNetwork::set_flat: wrong length");
  std::size_t pos = 0;
  for (auto& layer : coefficients)
    for (auto& k : layer)
      for (auto& v : k) v = values[pos++];
}

nlohmann::json QnnNetwork::to_json() const {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& layer : coefficients) {
    nlohmann::json neurons = nlohmann::json::array();
    for (const auto& k : layer) neurons.push_back(std::vector<double>(k.begin(), k.end()));
    layers.push_back(std::move(neurons));
  }
  return {{"layers", spec.sizes}, {"coefficients", layers}};
}

QnnNetwork QnnNetwork::from_json(const nlohmann::json& j) {
  QnnLayerSpec spec{j.at("layers").get<std::vector<std::size_t>>()};
  auto net = zeros(spec);
  const auto& layers = j.at("coefficients");
  if (layers.size() != net.coefficients.size()) throw std::invalid_argument("QnnNetwork::from_json: layer count");
  for (std::size_t t = 0; t < layers.size(); ++t) {
    if (layers[t].size() != net.coefficients[t].size())
      throw std::invalid_argument("QnnNetwork::from_json: neuron count");
    for (std::size_t n = 0; n < layers[t].size(); ++n) {
      const auto v = layers[t][n].get<std::vector<double>>();
      if (v.size() != static_cast<std::size_t>(net.coefficients[t][n].size()))
        throw std::invalid_argument("QnnNetwork::from_json: coefficient count");
      net.coefficients[t][n] = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
  }
  return net;
}

Eigen::MatrixXcd pauli_generator(std::span<const double> k, std::size_t g) {
  if (g < 1 || g > 6) throw std::invalid_argument("pauli_generator: unsupported qubit count");
  if (k.size() != generator_size(g)) throw std::invalid_argument("pauli_generator: wrong coefficient count");
  const std::size_t dim = std::size_t{1} << g;
  const Complex i1{0.0, 1.0};
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t s = 1; s <= k.size(); ++s) {
    const double coef = k[s - 1];
    if (coef == 0.0) continue;
    // every Pauli string has one non-zero per column: sigma |c> = phase |c ^ flip>
    std::size_t flip = 0;
    for (std::size_t a = 0; a < g; ++a) {
      const auto letter = (s >> (2 * (g - 1 - a))) & 3u;
      if (letter == 1 || letter == 2) flip |= std::size_t{1} << (g - 1 - a);
    }
    for (std::size_t c = 0; c < dim; ++c) {
      Complex phase{1.0, 0.0};
      for (std::size_t a = 0; a < g; ++a) {
        const auto letter = (s >> (2 * (g - 1 - a))) & 3u;
        const bool bit = (c >> (g - 1 - a)) & 1u;
        if (letter == 2) phase *= bit ? -i1 : i1;  // Y|0> = i|1>, Y|1> = -i|0>
        else if (letter == 3 && bit) phase = -phase;
      }
      h(static_cast<Eigen::Index>(c ^ flip), static_cast<Eigen::Index>(c)) += coef * phase;
    }
  }
  return h;
}

Eigen::MatrixXcd layer_unitary(std::span<const double> k, std::size_t g) {
  if (g > 4) throw std::invalid_argument("layer_unitary: at most 4 qubits");
  const Eigen::MatrixXcd h = pauli_generator(k, g);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  const Eigen::VectorXcd phases = (es.eigenvalues().cast<Complex>() * Complex{0.0, 1.0}).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Eigen::MatrixXcd embed_unitary(const Eigen::MatrixXcd& u, std::span<const std::size_t> qubits, std::size_t n) {
  const std::size_t k = qubits.size();
  if (u.rows() != static_cast<Eigen::Index>(std::size_t{1} << k)) throw std::invalid_argument("embed_unitary: size");
  const std::size_t dim = std::size_t{1} << n;
  std::uint64_t operand_mask = 0;
  for (auto q : qubits) operand_mask |= qubit_mask(n, q);
  auto local = [&](std::uint64_t idx) {
    std::size_t l = 0;
    for (std::size_t b = 0; b < k; ++b) l = (l << 1) | ((idx & qubit_mask(n, qubits[b])) ? 1u : 0u);
    return static_cast<Eigen::Index>(l);
  };
  std::vector<Eigen::Index> loc(dim);
  for (std::size_t i = 0; i < dim; ++i) loc[i] = local(i);
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c)
      if ((r & ~operand_mask) == (c & ~operand_mask))
        full(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = u(loc[r], loc[c]);
  return full;
}

namespace {

using NeuronUnitaries = std::vector<std::vector<Eigen::MatrixXcd>>;

NeuronUnitaries neuron_unitaries(const QnnNetwork& net) {
  NeuronUnitaries out(net.coefficients.size());
  for (std::size_t t = 0; t < net.coefficients.size(); ++t)
    for (const auto& k : net.coefficients[t])
      out[t].push_back(layer_unitary({k.data(), static_cast<std::size_t>(k.size())}, net.spec.neuron_qubits(t)));
  return out;
}

// Whole-transition unitary U_m ... U_1 on (inputs, outputs).
Eigen::MatrixXcd transition_unitary(const QnnLayerSpec& spec, std::size_t t, const std::vector<Eigen::MatrixXcd>& us) {
  const std::size_t in = spec.sizes[t];
  const std::size_t out = spec.sizes[t + 1];
  const std::size_t n = in + out;
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Identity(dim, dim);
  std::vector<std::size_t> qubits(in + 1);
  std::iota(qubits.begin(), qubits.begin() + static_cast<std::ptrdiff_t>(in), 0);
  for (std::size_t j = 0; j < out; ++j) {
    qubits[in] = in + j;
    total = embed_unitary(us[j], qubits, n) * total;
  }
  return total;
}

Eigen::MatrixXcd run_network(const QnnLayerSpec& spec, const std::vector<Eigen::MatrixXcd>& transitions,
                             const Eigen::MatrixXcd& rho_in) {
  Eigen::MatrixXcd rho = rho_in;
  for (std::size_t t = 0; t < spec.transitions(); ++t) {
    const std::size_t in = spec.sizes[t];
    const std::size_t out = spec.sizes[t + 1];
    const auto in_dim = static_cast<Eigen::Index>(std::size_t{1} << in);
    const auto out_dim = static_cast<Eigen::Index>(std::size_t{1} << out);
    // rho (x) |0..0><0..0|: inputs are the high bits, so only entries whose
    // output bits are all zero are populated
    Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(in_dim * out_dim, in_dim * out_dim);
    for (Eigen::Index r = 0; r < in_dim; ++r)
      for (Eigen::Index c = 0; c < in_dim; ++c) full(r * out_dim, c * out_dim) = rho(r, c);
    const auto& u = transitions[t];
    full = u * full * u.adjoint();
    // trace out the inputs
    Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(out_dim, out_dim);
    for (Eigen::Index e = 0; e < in_dim; ++e) next += full.block(e * out_dim, e * out_dim, out_dim, out_dim);
    rho = 0.5 * (next + next.adjoint());
  }
  return rho;
}

std::vector<Eigen::MatrixXcd> all_transitions(const QnnLayerSpec& spec, const NeuronUnitaries& us) {
  std::vector<Eigen::MatrixXcd> out;
  for (std::size_t t = 0; t < spec.transitions(); ++t) out.push_back(transition_unitary(spec, t, us[t]));
  return out;
}

// Pairs collapsed to one averaged input per distinct target; feedforward is
// linear in rho, so the mean fidelity is unchanged.
struct Group {
  Eigen::MatrixXcd rho;
  Eigen::VectorXcd target;
  double weight;
};

std::vector<Group> group_pairs(std::span<const QaePair> pairs, std::size_t in_qubits, std::size_t out_qubits) {
  if (pairs.empty()) throw std::invalid_argument("qae_cost: no pairs");
  std::vector<Group> groups;
  std::vector<std::size_t> members;
  for (const auto& p : pairs) {
    if (p.noisy.n_qubits() != in_qubits || p.target.n_qubits() != out_qubits)
      throw std::invalid_argument("qae_cost: pair size does not match the network");
    const Eigen::VectorXcd t = p.target.to_eigen();
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) { return g.target == t; });
    if (it == groups.end()) {
      groups.push_back({p.noisy.matrix(), t, 0.0});
      members.push_back(1);
    } else {
      it->rho += p.noisy.matrix();
      ++members[static_cast<std::size_t>(it - groups.begin())];
    }
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    groups[g].rho /= static_cast<double>(members[g]);
    groups[g].weight = static_cast<double>(members[g]) / static_cast<double>(pairs.size());
  }
  return groups;
}

double grouped_cost(const QnnLayerSpec& spec, const std::vector<Eigen::MatrixXcd>& transitions,
                    const std::vector<Group>& groups) {
  double total = 0.0;
  for (const auto& g : groups) {
    const Eigen::MatrixXcd out = run_network(spec, transitions, g.rho);
    total += g.weight * (g.target.adjoint() * out * g.target)(0, 0).real();
  }
  return total;
}

// Finite-difference gradient reusing every unperturbed neuron unitary.
std::vector<double> grouped_gradient(const QnnNetwork& net, const std::vector<Group>& groups, double eps) {
  const auto& spec = net.spec;
  const auto base_units = neuron_unitaries(net);
  const auto base_transitions = all_transitions(spec, base_units);
  std::vector<double> grad;
  grad.reserve(net.parameter_count());
  for (std::size_t t = 0; t < net.coefficients.size(); ++t) {
    const auto g = spec.neuron_qubits(t);
    for (std::size_t j = 0; j < net.coefficients[t].size(); ++j) {
      Eigen::VectorXd k = net.coefficients[t][j];
      auto units = base_units[t];
      auto transitions = base_transitions;
      for (Eigen::Index c = 0; c < k.size(); ++c) {
        const double orig = k[c];
        k[c] = orig + eps;
        units[j] = layer_unitary({k.data(), static_cast<std::size_t>(k.size())}, g);
        transitions[t] = transition_unitary(spec, t, units);
        const double up = grouped_cost(spec, transitions, groups);
        k[c] = orig - eps;
        units[j] = layer_unitary({k.data(), static_cast<std::size_t>(k.size())}, g);
        transitions[t] = transition_unitary(spec, t, units);
        const double down = grouped_cost(spec, transitions, groups);
        k[c] = orig;
        grad.push_back((up - down) / (2.0 * eps));
      }
    }
  }
  return grad;
}

}  // namespace

DensityMatrix feedforward(const QnnNetwork& net, const DensityMatrix& rho_in) {
  net.spec.validate();
  if (rho_in.n_qubits() != net.spec.input_size())
    throw std::invalid_argument("feedforward: input state size does not match the network");
  const auto transitions = all_transitions(net.spec, neuron_unitaries(net));
  return DensityMatrix(net.spec.output_size(), run_network(net.spec, transitions, rho_in.matrix()));
}

double qae_cost(const QnnNetwork& net, std::span<const QaePair> pairs) {
  const auto groups = group_pairs(pairs, net.spec.input_size(), net.spec.output_size());
  return grouped_cost(net.spec, all_transitions(net.spec, neuron_unitaries(net)), groups);
}

std::vector<double> qae_gradient(const QnnNetwork& net, std::span<const QaePair> pairs, double eps) {
  return grouped_gradient(net, group_pairs(pairs, net.spec.input_size(), net.spec.output_size()), eps);
}

namespace {

QaeTrainResult train_impl(const QnnNetwork& net, const std::function<std::vector<Group>(std::size_t)>& epoch_groups,
                          const std::vector<Group>& eval_groups, const QaeTrainOptions& opts) {
  if (opts.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
  if (!(opts.step > 0.0)) throw std::invalid_argument("train: step must be positive");
  auto eval = [&](const QnnNetwork& n) {
    return grouped_cost(n.spec, all_transitions(n.spec, neuron_unitaries(n)), eval_groups);
  };
  QaeTrainResult result{net, 0.0, 0.0, {}};
  result.initial_cost = eval(net);
  result.best_cost = result.initial_cost;

  QnnNetwork current = net;
  double step = opts.step;
  for (std::size_t epoch = 0; epoch < opts.epochs; ++epoch) {
    if (opts.decay_every > 0 && epoch > 0 && epoch % opts.decay_every == 0) step *= opts.decay;
    const auto grad = grouped_gradient(current, epoch_groups(epoch), opts.fd_eps);
    auto params = current.flat();
    for (std::size_t i = 0; i < params.size(); ++i) params[i] += step * grad[i];
    current.set_flat(params);
    const double c = eval(current);
    result.history.push_back(c);
    if (c > result.best_cost) {
      result.best_cost = c;
      result.network = current;
    }
  }
  return result;
}

}  // namespace

QaeTrainResult train(const QnnNetwork& net, std::span<const QaePair> pairs, const QaeTrainOptions& opts) {
  const auto groups = group_pairs(pairs, net.spec.input_size(), net.spec.output_size());
  return train_impl(net, [&](std::size_t) { return groups; }, groups, opts);
}

QaeTrainResult train(const QnnNetwork& net, const PairSource& source, std::span<const QaePair> eval_pairs,
                     const QaeTrainOptions& opts, Rng& rng) {
  const auto in = net.spec.input_size();
  const auto out = net.spec.output_size();
  const auto eval_groups = group_pairs(eval_pairs, in, out);
  return train_impl(
      net, [&](std::size_t epoch) { return group_pairs(source(epoch, rng), in, out); }, eval_groups, opts);
}

std::vector<QaePair> trajectory_pairs(const Circuit& circuit, const NoiseSpec& noise, std::size_t count, Rng& rng) {
  const auto n = circuit.n_qubits();
  const auto clean = apply(circuit, zero_state(n));
  std::vector<QaePair> pairs;
  pairs.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    pairs.push_back({DensityMatrix(apply_noisy(circuit, zero_state(n), noise, rng)), clean});
  return pairs;
}

Circuit swap_test_circuit(std::size_t n) {
  Circuit c(1 + 2 * n);
  c.h(0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = 1 + i;
    const std::size_t b = 1 + n + i;
    c.cnot(b, a).ccx(0, a, b).cnot(b, a);
  }
  c.h(0);
  return c;
}

double swap_test_fidelity(const DensityMatrix& rho, const StateVector& target, std::size_t shots, Rng& rng) {
  const auto n = target.n_qubits();
  if (rho.n_qubits() != n) throw std::invalid_argument("swap_test_fidelity: size mismatch");
  if (shots < 1) throw std::invalid_argument("swap_test_fidelity: shots must be >= 1");
  const auto circuit = swap_test_circuit(n);

  // rho as an ensemble of its eigenvectors
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.matrix());
  const auto dim = static_cast<Eigen::Index>(rho.dim());
  std::vector<double> weights(static_cast<std::size_t>(dim));
  std::vector<double> p0(static_cast<std::size_t>(dim), 0.0);
  const auto t = target.to_eigen();
  for (Eigen::Index k = 0; k < dim; ++k) {
    weights[static_cast<std::size_t>(k)] = std::max(0.0, es.eigenvalues()[k]);
    if (weights[static_cast<std::size_t>(k)] == 0.0) continue;
    // |0> (x) |v_k> (x) |target>
    std::vector<Complex> amp(std::size_t{1} << (1 + 2 * n), Complex{0.0, 0.0});
    for (Eigen::Index a = 0; a < dim; ++a)
      for (Eigen::Index b = 0; b < dim; ++b) amp[static_cast<std::size_t>(a * dim + b)] = es.eigenvectors()(a, k) * t[b];
    const auto out = apply(circuit, StateVector(1 + 2 * n, std::move(amp)));
    const auto half = out.dim() / 2;
    double p = 0.0;
    for (std::size_t i = 0; i < half; ++i) p += std::norm(out[i]);
    p0[static_cast<std::size_t>(k)] = p;
  }
  std::vector<double> cumulative(weights.size());
  std::partial_sum(weights.begin(), weights.end(), cumulative.begin());
  std::size_t zeros = 0;
  for (std::size_t s = 0; s < shots; ++s) {
    const auto k = draw_from_cumulative(rng, cumulative);
    if (bernoulli(rng, p0[k])) ++zeros;
  }
  return 2.0 * static_cast<double>(zeros) / static_cast<double>(shots) - 1.0;
}

void write_cost_history(std::span<const double> history, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "epoch,cost\n" << std::setprecision(17);
  for (std::size_t i = 0; i < history.size(); ++i) out << (i + 1) << ',' << history[i] << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace qcoreset
