#include "modesn/readout.hpp"

#include <lapacke.h>

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <string>

#include "modesn/network_io.hpp"

namespace modesn {
namespace {

struct Svd {
  Eigen::MatrixXd u;
  Eigen::VectorXd s;
  Eigen::MatrixXd v;
};

// LAPACK divide and conquer, falling back to QR iteration if it fails to
// converge. (Eigen 3.4.0's BDCSVD returns NaN factors on strongly
// rank-deficient state histories.)
Svd thin_svd(const Eigen::MatrixXd& m) {
  const auto rows = static_cast<lapack_int>(m.rows());
  const auto cols = static_cast<lapack_int>(m.cols());
  const lapack_int r = std::min(rows, cols);
  Svd out{Eigen::MatrixXd(rows, r), Eigen::VectorXd(r), Eigen::MatrixXd()};
  Eigen::MatrixXd vt(r, cols);
  Eigen::MatrixXd work = m;
  lapack_int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'S', rows, cols, work.data(), rows, out.s.data(),
                                   out.u.data(), rows, vt.data(), r);
  if (info > 0) {
    work = m;
    Eigen::VectorXd superb(std::max<lapack_int>(r - 1, 1));
    info = LAPACKE_dgesvd(LAPACK_COL_MAJOR, 'S', 'S', rows, cols, work.data(), rows, out.s.data(),
                          out.u.data(), rows, vt.data(), r, superb.data());
  }
  if (info != 0) throw std::runtime_error("SVD failed (LAPACK info " + std::to_string(info) + ")");
  out.v = vt.transpose();
  return out;
}

Eigen::VectorXd inverted_spectrum(const Eigen::VectorXd& s, double rel_tol, double ridge) {
  const double cutoff = s.size() > 0 ? rel_tol * s.maxCoeff() : 0.0;
  Eigen::VectorXd inv(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] <= cutoff) {
      inv[i] = 0.0;
    } else {
      inv[i] = ridge > 0.0 ? s[i] / (s[i] * s[i] + ridge) : 1.0 / s[i];
    }
  }
  return inv;
}

}  // namespace

void TrainingSet::validate() const {
  if (X.cols() != Y.cols()) throw std::invalid_argument("training set: X and Y differ in length");
  if (X.cols() == 0 || X.rows() == 0) throw std::invalid_argument("training set: empty design matrix");
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m, double rel_tol) {
  const Svd svd = thin_svd(m);
  const Eigen::VectorXd inv = inverted_spectrum(svd.s, rel_tol, 0.0);
  return svd.v * inv.asDiagonal() * svd.u.transpose();
}

ReadoutLayer train_readout(const TrainingSet& set, const ReadoutOptions& options) {
  set.validate();
  if (set.X.cwiseAbs().maxCoeff() == 0.0) {
    throw std::domain_error("training set: design matrix is identically zero");
  }
  if (options.ridge_lambda < 0.0) throw std::invalid_argument("ridge_lambda must be non-negative");
  // Y X^+ = (Y V) S^+ U^T, never forming the T x (N + k) pseudo-inverse.
  const Svd svd = thin_svd(set.X);
  const Eigen::VectorXd inv = inverted_spectrum(svd.s, options.rel_tol, options.ridge_lambda);
  Eigen::MatrixXd yv = set.Y * svd.v;
  yv = yv * inv.asDiagonal();
  return {yv * svd.u.transpose()};
}

Eigen::VectorXd readout_continuous(const ReadoutLayer& layer, const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& u) {
  if (static_cast<std::size_t>(x.size() + u.size()) != layer.n_features()) {
    throw std::invalid_argument("readout: [x : u] does not match W_out");
  }
  return layer.W_out.leftCols(x.size()) * x + layer.W_out.rightCols(u.size()) * u;
}

Eigen::VectorXd readout_step(const Eigen::VectorXd& y_linear) {
  return y_linear.unaryExpr([](double z) { return readout_step(z); });
}

double r_squared(std::span<const double> target, std::span<const double> predicted) {
  if (target.size() != predicted.size()) throw std::invalid_argument("r_squared: length mismatch");
  if (target.size() < 2) throw std::invalid_argument("r_squared: at least two samples required");
  const auto n = static_cast<double>(target.size());
  double mean_t = 0.0;
  double mean_p = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    mean_t += target[i];
    mean_p += predicted[i];
  }
  mean_t /= n;
  mean_p /= n;
  double cov = 0.0;
  double var_t = 0.0;
  double var_p = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double dt = target[i] - mean_t;
    const double dp = predicted[i] - mean_p;
    cov += dt * dp;
    var_t += dt * dt;
    var_p += dp * dp;
  }
  if (var_t == 0.0) throw std::domain_error("r_squared: target has zero variance");
  if (var_p == 0.0) return 0.0;
  const double r2 = (cov / var_t) * (cov / var_p);
  return std::clamp(r2, 0.0, 1.0);
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_real(m(i, j));
    }
    out << '\n';
  }
}

}  // namespace modesn
