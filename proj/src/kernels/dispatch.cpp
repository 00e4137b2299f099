#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernel_table.hpp"
#include "modesn/kernels.hpp"

namespace modesn::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(MODESN_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool has = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") != 0;
  }();
  return has;
#else
  return false;
#endif
}

const detail::Table& table_for(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return detail::scalar_table();
    case Isa::avx2:
#if defined(MODESN_HAVE_AVX2)
      if (cpu_has_avx2()) return detail::avx2_table();
#endif
      throw std::runtime_error("avx2 kernels are not available on this build or CPU");
  }
  throw std::logic_error("unknown kernel isa");
}

Isa initial_isa() {
  if (const char* env = std::getenv("MODESN_KERNELS")) {
    const std::string value(env);
    if (value == "scalar") return Isa::scalar;
    if (value == "avx2" && available(Isa::avx2)) return Isa::avx2;
  }
  return available(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

detail::Sigmoid to_detail(const SigmoidCoeffs& p) { return {p.a, p.b, p.c, p.k, p.d}; }

detail::Ell to_detail(const EllMatrix& m) {
  return {m.rows(), m.width(), m.col_data(), m.value_data()};
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

EllMatrix::EllMatrix(std::size_t rows, std::size_t cols, std::size_t width)
    : rows_(rows), cols_(cols), width_(width), col_idx_(rows * width, 0), values_(rows * width, 0.0) {
  require(rows == 0 || cols > 0, "EllMatrix: padding column 0 must exist");
}

void EllMatrix::set(std::size_t row, std::size_t slot, std::uint32_t col, double value) {
  require(row < rows_ && slot < width_ && col < cols_, "EllMatrix::set: index out of range");
  col_idx_[slot * rows_ + row] = col;
  values_[slot * rows_ + row] = value;
}

void EllMatrix::scale(double factor) {
  for (double& v : values_) v *= factor;
}

bool available(Isa isa) { return isa == Isa::scalar || cpu_has_avx2(); }

Isa active() { return current().load(std::memory_order_relaxed); }

void select(Isa isa) {
  table_for(isa);
  current().store(isa, std::memory_order_relaxed);
}

std::string_view name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

void exp(std::span<const double> in, std::span<double> out) { exp(active(), in, out); }

void exp(Isa isa, std::span<const double> in, std::span<double> out) {
  require(in.size() == out.size(), "exp: size mismatch");
  table_for(isa).exp(in.data(), out.data(), in.size());
}

void sigmoid(std::span<const double> z, std::span<double> out, const SigmoidCoeffs& p) {
  sigmoid(active(), z, out, p);
}

void sigmoid(Isa isa, std::span<const double> z, std::span<double> out, const SigmoidCoeffs& p) {
  require(z.size() == out.size(), "sigmoid: size mismatch");
  table_for(isa).sigmoid(z.data(), out.data(), z.size(), to_detail(p));
}

void matvec(const EllMatrix& m, std::span<const double> x, std::span<double> out) {
  matvec(active(), m, x, out);
}

void matvec(Isa isa, const EllMatrix& m, std::span<const double> x, std::span<double> out) {
  require(x.size() == m.cols() && out.size() == m.rows(), "matvec: dimension mismatch");
  table_for(isa).ell_matvec(to_detail(m), x.data(), out.data());
}

void reservoir_update(const EllMatrix& m, std::span<const double> x, std::span<const double> drive,
                      const SigmoidCoeffs& p, std::span<double> out) {
  reservoir_update(active(), m, x, drive, p, out);
}

void reservoir_update(Isa isa, const EllMatrix& m, std::span<const double> x,
                      std::span<const double> drive, const SigmoidCoeffs& p, std::span<double> out) {
  require(x.size() == m.cols() && drive.size() == m.rows() && out.size() == m.rows(),
          "reservoir_update: dimension mismatch");
  require(x.data() != out.data(), "reservoir_update: output must not alias the state");
  table_for(isa).reservoir_update(to_detail(m), x.data(), drive.data(), to_detail(p), out.data());
}

double exp_scalar(double x) {
  double out = 0.0;
  detail::scalar_table().exp(&x, &out, 1);
  return out;
}

double sigmoid_scalar(double z, const SigmoidCoeffs& p) {
  double out = 0.0;
  detail::scalar_table().sigmoid(&z, &out, 1, to_detail(p));
  return out;
}

}  // namespace modesn::kernels
