// Data-parallel inner loops of the reservoir update.
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant. The variant in use is picked once at startup from CPUID and can be
// overridden (MODESN_KERNELS=scalar|avx2 or select()). Variants are required to
// agree bit for bit; tests/test_kernels.cpp enforces that.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace modesn::kernels {

enum class Isa { scalar, avx2 };

struct SigmoidCoeffs {
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
  double k = 10.0;
  double d = 0.0;
};

/// Sparse matrix with a fixed number of slots per row (ELLPACK layout).
/// Unused slots point at column 0 with weight 0.
class EllMatrix {
 public:
  EllMatrix() = default;
  EllMatrix(std::size_t rows, std::size_t cols, std::size_t width);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t width() const { return width_; }

  void set(std::size_t row, std::size_t slot, std::uint32_t col, double value);
  std::uint32_t col_at(std::size_t row, std::size_t slot) const {
    return col_idx_[slot * rows_ + row];
  }
  double value_at(std::size_t row, std::size_t slot) const { return values_[slot * rows_ + row]; }
  void scale(double factor);

  const std::uint32_t* col_data() const { return col_idx_.data(); }
  const double* value_data() const { return values_.data(); }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t width_ = 0;
  std::vector<std::uint32_t> col_idx_;
  std::vector<double> values_;
};

bool available(Isa isa);
Isa active();
void select(Isa isa);
std::string_view name(Isa isa);

// Each call dispatches to the active variant unless an explicit Isa is given.
void exp(std::span<const double> in, std::span<double> out);
void exp(Isa isa, std::span<const double> in, std::span<double> out);

void sigmoid(std::span<const double> z, std::span<double> out, const SigmoidCoeffs& p);
void sigmoid(Isa isa, std::span<const double> z, std::span<double> out, const SigmoidCoeffs& p);

void matvec(const EllMatrix& m, std::span<const double> x, std::span<double> out);
void matvec(Isa isa, const EllMatrix& m, std::span<const double> x, std::span<double> out);

/// out = sigmoid(m * x + drive)
void reservoir_update(const EllMatrix& m, std::span<const double> x, std::span<const double> drive,
                      const SigmoidCoeffs& p, std::span<double> out);
void reservoir_update(Isa isa, const EllMatrix& m, std::span<const double> x,
                      std::span<const double> drive, const SigmoidCoeffs& p, std::span<double> out);

/// Scalar reference exp and sigmoid for single values.
double exp_scalar(double x);
double sigmoid_scalar(double z, const SigmoidCoeffs& p);

}  // namespace modesn::kernels
