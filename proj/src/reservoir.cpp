#include "modesn/reservoir.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "modesn/network_io.hpp"
#include "modesn/rng.hpp"

namespace modesn {

void ActivationParams::validate() const {
  if (!(k_steepness > 0.0)) throw std::invalid_argument("k_steepness must be positive");
}

double activation(double z, const ActivationParams& p) {
  return kernels::sigmoid_scalar(z, p.coeffs());
}

InputWeights InputWeights::zeros(std::size_t n_nodes, std::size_t k_inputs) {
  InputWeights w;
  w.matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_nodes), static_cast<Eigen::Index>(k_inputs));
  w.targets.resize(k_inputs);
  return w;
}

InputWeights InputWeights::concat(const InputWeights& other) const {
  if (other.n_nodes() != n_nodes()) throw std::invalid_argument("input weights: node count mismatch");
  InputWeights out;
  out.matrix.resize(matrix.rows(), matrix.cols() + other.matrix.cols());
  out.matrix << matrix, other.matrix;
  out.targets = targets;
  out.targets.insert(out.targets.end(), other.targets.begin(), other.targets.end());
  out.r_sig = r_sig;
  out.input_gain = input_gain;
  return out;
}

InputWeights build_input_weights(std::size_t k_inputs, std::size_t n_nodes,
                                 std::span<const std::uint32_t> target_nodes, double r_sig,
                                 double w_min_in, double w_max_in, double input_gain,
                                 std::uint64_t rng_seed) {
  if (!(r_sig > 0.0 && r_sig <= 1.0)) throw std::invalid_argument("r_sig must lie in (0, 1]");
  if (target_nodes.empty()) throw std::invalid_argument("target node set is empty");
  if (!(w_min_in <= w_max_in)) throw std::invalid_argument("input weight bounds are inverted");
  for (const auto node : target_nodes) {
    if (node >= n_nodes) throw std::invalid_argument("target node out of range");
  }
  const auto count = static_cast<std::size_t>(std::llround(r_sig * static_cast<double>(target_nodes.size())));
  if (count == 0) throw std::invalid_argument("r_sig too small: no node would receive input");

  InputWeights w = InputWeights::zeros(n_nodes, k_inputs);
  w.r_sig = r_sig;
  w.input_gain = input_gain;
  Rng rng(rng_seed);
  for (std::size_t j = 0; j < k_inputs; ++j) {
    auto picks = rng.sample(target_nodes.size(), count);
    std::vector<std::uint32_t> nodes;
    nodes.reserve(count);
    for (const auto p : picks) nodes.push_back(target_nodes[p]);
    std::ranges::sort(nodes);
    for (const auto node : nodes) {
      w.matrix(node, static_cast<Eigen::Index>(j)) = rng.uniform(w_min_in, w_max_in) * input_gain;
    }
    w.targets[j] = std::move(nodes);
  }
  return w;
}

Reservoir::Reservoir(const WeightedNetwork& network, InputWeights input, ActivationParams params)
    : w_(network.ell()), input_(std::move(input)), params_(params), coeffs_(params.coeffs()) {
  params_.validate();
  if (input_.n_nodes() != network.n_nodes()) {
    throw std::invalid_argument("input weights do not match the network size");
  }
}

void Reservoir::input_drive(std::span<const double> u, std::span<double> drive) const {
  if (u.size() != k_inputs() || drive.size() != n_nodes()) {
    throw std::invalid_argument("input drive: dimension mismatch");
  }
  std::fill(drive.begin(), drive.end(), 0.0);
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (u[j] == 0.0) continue;
    const auto col = static_cast<Eigen::Index>(j);
    for (const auto node : input_.targets[j]) drive[node] += input_.matrix(node, col) * u[j];
  }
}

void Reservoir::advance(std::span<const double> x, std::span<const double> u,
                        std::span<double> out) const {
  if (x.size() != n_nodes()) throw std::invalid_argument("state dimension mismatch");
  std::vector<double> drive(n_nodes());
  input_drive(u, drive);
  kernels::reservoir_update(w_, x, drive, coeffs_, out);
}

ReservoirState Reservoir::step(const ReservoirState& state, std::span<const double> u_next) const {
  ReservoirState next{Eigen::VectorXd(static_cast<Eigen::Index>(n_nodes())), state.t + 1};
  advance(std::span<const double>(state.x.data(), static_cast<std::size_t>(state.x.size())), u_next,
          std::span<double>(next.x.data(), n_nodes()));
  return next;
}

StateHistory Reservoir::run(const InputStream& input, const Eigen::VectorXd& x0) const {
  if (input.cols() < 1) throw std::invalid_argument("run: at least one time step is required");
  if (static_cast<std::size_t>(input.rows()) != k_inputs()) {
    throw std::invalid_argument("run: input dimension does not match W_in");
  }
  if (static_cast<std::size_t>(x0.size()) != n_nodes()) {
    throw std::invalid_argument("run: initial state dimension mismatch");
  }
  const std::size_t n = n_nodes();
  StateHistory history(static_cast<Eigen::Index>(n), input.cols());
  std::vector<double> drive(n);
  std::vector<double> u(k_inputs());
  const double* prev = x0.data();
  for (Eigen::Index t = 0; t < input.cols(); ++t) {
    for (std::size_t j = 0; j < u.size(); ++j) u[j] = input(static_cast<Eigen::Index>(j), t);
    input_drive(u, drive);
    double* next = history.col(t).data();
    kernels::reservoir_update(w_, std::span<const double>(prev, n), drive, coeffs_,
                              std::span<double>(next, n));
    prev = next;
  }
  return history;
}

void write_state_history(std::ostream& out, const StateHistory& history) {
  for (Eigen::Index t = 0; t < history.cols(); ++t) {
    for (Eigen::Index i = 0; i < history.rows(); ++i) {
      if (i > 0) out << ',';
      out << format_real(history(i, t));
    }
    out << '\n';
  }
}

}  // namespace modesn
