// Linear readouts trained by least squares.
#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>

#include <Eigen/Dense>

namespace modesn {

/// Columns are time steps; X rows are [x(t) : u(t)], Y rows are targets.
struct TrainingSet {
  Eigen::MatrixXd X;
  Eigen::MatrixXd Y;

  void validate() const;
  /// At least as many samples as features.
  bool well_posed() const { return X.cols() >= X.rows(); }
};

struct ReadoutOptions {
  /// Singular values below rel_tol * sigma_max are treated as zero.
  double rel_tol = 1e-10;
  /// Tikhonov term; zero reproduces the plain pseudo-inverse.
  double ridge_lambda = 0.0;
};

struct ReadoutLayer {
  Eigen::MatrixXd W_out;  // l x (N + k)

  std::size_t n_readouts() const { return static_cast<std::size_t>(W_out.rows()); }
  std::size_t n_features() const { return static_cast<std::size_t>(W_out.cols()); }
};

/// Moore-Penrose pseudo-inverse via thin SVD.
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m, double rel_tol = 1e-10);

/// W_out = Y X^+. Throws std::domain_error if X is identically zero.
ReadoutLayer train_readout(const TrainingSet& set, const ReadoutOptions& options = {});

/// W_out [x : u]
Eigen::VectorXd readout_continuous(const ReadoutLayer& layer, const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& u);

/// 1 where the component exceeds 0.5, else 0.
Eigen::VectorXd readout_step(const Eigen::VectorXd& y_linear);
inline double readout_step(double z) { return z > 0.5 ? 1.0 : 0.0; }

/// Squared Pearson correlation. A constant prediction scores 0; a constant
/// target is an error.
double r_squared(std::span<const double> target, std::span<const double> predicted);

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m);

}  // namespace modesn
