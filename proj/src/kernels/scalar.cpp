#include <cmath>
#include <cstring>

#include "kernel_table.hpp"

namespace modesn::kernels::detail {
namespace {

inline double exp_one(double x) {
  x = x < kExpClampLo ? kExpClampLo : x;
  x = x > kExpClampHi ? kExpClampHi : x;
  const double n = std::nearbyint(x * kLog2e);
  const double r = (x - n * kLn2Hi) - n * kLn2Lo;
  double p = kExpCoeff[kExpDegree];
  for (int j = kExpDegree - 1; j >= 0; --j) {
    p = p * r + kExpCoeff[j];
  }
  const double biased = (n + 1023.0) + kTwo52;
  std::uint64_t bits;
  std::memcpy(&bits, &biased, sizeof bits);
  bits <<= 52;
  double scale;
  std::memcpy(&scale, &bits, sizeof scale);
  return p * scale;
}

inline double sigmoid_one(double z, const Sigmoid& s) {
  double arg = (-s.k) * z + s.c;
  arg = arg < -kSigmoidArgBound ? -kSigmoidArgBound : arg;
  arg = arg > kSigmoidArgBound ? kSigmoidArgBound : arg;
  const double e = exp_one(arg);
  const double q = s.b / (1.0 + e);
  return s.a * (q - s.d);
}

void exp_n(const double* in, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = exp_one(in[i]);
}

void sigmoid_n(const double* z, double* out, std::size_t n, const Sigmoid& s) {
  for (std::size_t i = 0; i < n; ++i) out[i] = sigmoid_one(z[i], s);
}

inline double row_dot(const Ell& m, const double* x, std::size_t i) {
  double acc = 0.0;
  for (std::size_t slot = 0; slot < m.width; ++slot) {
    const std::size_t e = slot * m.rows + i;
    acc = acc + m.vals[e] * x[m.cols[e]];
  }
  return acc;
}

void ell_matvec(const Ell& m, const double* x, double* out) {
  for (std::size_t i = 0; i < m.rows; ++i) out[i] = row_dot(m, x, i);
}

void reservoir_update(const Ell& m, const double* x, const double* drive, const Sigmoid& s,
                      double* out) {
  for (std::size_t i = 0; i < m.rows; ++i) {
    out[i] = sigmoid_one(row_dot(m, x, i) + drive[i], s);
  }
}

}  // namespace

const Table& scalar_table() {
  static const Table table{"scalar", &exp_n, &sigmoid_n, &ell_matvec, &reservoir_update};
  return table;
}

}  // namespace modesn::kernels::detail
