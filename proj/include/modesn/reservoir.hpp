// Discrete-time echo state dynamics:
//   x(t+1) = f(W x(t) + W_in u(t+1)),  f(z) = a (b / (1 + exp(-k z + c)) - d)
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "modesn/kernels.hpp"
#include "modesn/topology.hpp"

namespace modesn {

struct ActivationParams {
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
  double k_steepness = 10.0;
  double d = 0.0;

  void validate() const;
  kernels::SigmoidCoeffs coeffs() const { return {a, b, c, k_steepness, d}; }
};

/// Exponent saturates at +/-500.
double activation(double z, const ActivationParams& p = {});

/// Input weight matrix (N x k). Column j is nonzero exactly on targets[j].
struct InputWeights {
  Eigen::MatrixXd matrix;
  std::vector<std::vector<std::uint32_t>> targets;
  double r_sig = 0.0;
  double input_gain = 1.0;

  std::size_t n_nodes() const { return static_cast<std::size_t>(matrix.rows()); }
  std::size_t k_inputs() const { return static_cast<std::size_t>(matrix.cols()); }

  static InputWeights zeros(std::size_t n_nodes, std::size_t k_inputs);
  /// Column-wise concatenation [*this, other].
  InputWeights concat(const InputWeights& other) const;
};

/// For each input dimension, round(r_sig * |target_nodes|) distinct nodes drawn
/// from target_nodes get weight U(w_min_in, w_max_in) * input_gain.
InputWeights build_input_weights(std::size_t k_inputs, std::size_t n_nodes,
                                 std::span<const std::uint32_t> target_nodes, double r_sig,
                                 double w_min_in, double w_max_in, double input_gain,
                                 std::uint64_t rng_seed);

struct ReservoirState {
  Eigen::VectorXd x;
  std::int64_t t = 0;

  static ReservoirState zeros(std::size_t n_nodes) { return {Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_nodes)), 0}; }
};

/// k x T; column t - 1 is u(t).
using InputStream = Eigen::MatrixXd;
/// N x T; column t - 1 is x(t).
using StateHistory = Eigen::MatrixXd;

/// W compiled for the update kernel, plus input weights and activation.
class Reservoir {
 public:
  Reservoir(const WeightedNetwork& network, InputWeights input, ActivationParams params = {});

  std::size_t n_nodes() const { return w_.rows(); }
  std::size_t k_inputs() const { return input_.k_inputs(); }
  const ActivationParams& params() const { return params_; }
  const InputWeights& input() const { return input_; }
  const kernels::EllMatrix& weights() const { return w_; }

  /// W_in u, accumulated over input dimensions in order.
  void input_drive(std::span<const double> u, std::span<double> drive) const;

  /// Allocation-free update; `out` must not alias `x`.
  void advance(std::span<const double> x, std::span<const double> u, std::span<double> out) const;

  ReservoirState step(const ReservoirState& state, std::span<const double> u_next) const;
  StateHistory run(const InputStream& input, const Eigen::VectorXd& x0) const;

 private:
  kernels::EllMatrix w_;
  InputWeights input_;
  ActivationParams params_;
  kernels::SigmoidCoeffs coeffs_;
};

inline ReservoirState step(const Reservoir& reservoir, const ReservoirState& state,
                           std::span<const double> u_next) {
  return reservoir.step(state, u_next);
}

inline StateHistory run(const Reservoir& reservoir, const InputStream& input,
                        const Eigen::VectorXd& x0) {
  return reservoir.run(input, x0);
}

/// One row per time step, one column per node, 17 significant digits.
void write_state_history(std::ostream& out, const StateHistory& history);

}  // namespace modesn
