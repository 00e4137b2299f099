// Internal kernel interface shared by the scalar and SIMD translation units.
// Kept free of standard-library templates so the AVX2 unit cannot leak
// AVX-encoded inline instantiations into the rest of the program.
#pragma once

#include <cstddef>
#include <cstdint>

namespace modesn::kernels::detail {

struct Sigmoid {
  double a;
  double b;
  double c;
  double k;
  double d;
};

// Row-padded sparse matrix, slot-major: entry s of row i lives at [s * rows + i].
struct Ell {
  std::size_t rows;
  std::size_t width;
  const std::uint32_t* cols;
  const double* vals;
};

struct Table {
  const char* name;
  void (*exp)(const double* in, double* out, std::size_t n);
  void (*sigmoid)(const double* z, double* out, std::size_t n, const Sigmoid& p);
  void (*ell_matvec)(const Ell& m, const double* x, double* out);
  void (*reservoir_update)(const Ell& m, const double* x, const double* drive, const Sigmoid& p,
                           double* out);
};

// exp(x) by Cody-Waite reduction and a degree-13 Taylor polynomial. Both
// variants evaluate exactly this operation sequence, so they agree bit for bit.
inline constexpr double kExpClampLo = -700.0;
inline constexpr double kExpClampHi = 700.0;
inline constexpr double kLog2e = 1.4426950408889634074;
inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
inline constexpr double kTwo52 = 4503599627370496.0;
inline constexpr int kExpDegree = 13;
// 1/j! for j = 0..13
inline constexpr double kExpCoeff[kExpDegree + 1] = {
    1.0,
    1.0,
    1.0 / 2.0,
    1.0 / 6.0,
    1.0 / 24.0,
    1.0 / 120.0,
    1.0 / 720.0,
    1.0 / 5040.0,
    1.0 / 40320.0,
    1.0 / 362880.0,
    1.0 / 3628800.0,
    1.0 / 39916800.0,
    1.0 / 479001600.0,
    1.0 / 6227020800.0,
};

// Sigmoid exponent saturation bound.
inline constexpr double kSigmoidArgBound = 500.0;

const Table& scalar_table();
#if defined(MODESN_HAVE_AVX2)
const Table& avx2_table();
#endif

}  // namespace modesn::kernels::detail
