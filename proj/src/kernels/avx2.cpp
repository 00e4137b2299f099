// AVX2 variants. Compiled with -mavx2 only (no FMA) and -ffp-contract=off so
// that every lane performs the scalar kernel's operation sequence exactly.
#include <immintrin.h>

#include "kernel_table.hpp"

namespace modesn::kernels::detail {
namespace {

inline __m256d exp4(__m256d x) {
  x = _mm256_max_pd(x, _mm256_set1_pd(kExpClampLo));
  x = _mm256_min_pd(x, _mm256_set1_pd(kExpClampHi));
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kLog2e)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  const __m256d r = _mm256_sub_pd(_mm256_sub_pd(x, _mm256_mul_pd(n, _mm256_set1_pd(kLn2Hi))),
                                  _mm256_mul_pd(n, _mm256_set1_pd(kLn2Lo)));
  __m256d p = _mm256_set1_pd(kExpCoeff[kExpDegree]);
  for (int j = kExpDegree - 1; j >= 0; --j) {
    p = _mm256_add_pd(_mm256_mul_pd(p, r), _mm256_set1_pd(kExpCoeff[j]));
  }
  const __m256d biased =
      _mm256_add_pd(_mm256_add_pd(n, _mm256_set1_pd(1023.0)), _mm256_set1_pd(kTwo52));
  const __m256d scale = _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_castpd_si256(biased), 52));
  return _mm256_mul_pd(p, scale);
}

inline __m256d sigmoid4(__m256d z, const Sigmoid& s) {
  __m256d arg = _mm256_add_pd(_mm256_mul_pd(_mm256_set1_pd(-s.k), z), _mm256_set1_pd(s.c));
  arg = _mm256_max_pd(arg, _mm256_set1_pd(-kSigmoidArgBound));
  arg = _mm256_min_pd(arg, _mm256_set1_pd(kSigmoidArgBound));
  const __m256d e = exp4(arg);
  const __m256d q = _mm256_div_pd(_mm256_set1_pd(s.b), _mm256_add_pd(_mm256_set1_pd(1.0), e));
  return _mm256_mul_pd(_mm256_set1_pd(s.a), _mm256_sub_pd(q, _mm256_set1_pd(s.d)));
}

// Loads up to four values, zero-filling the unused lanes.
inline __m256d load_partial(const double* p, std::size_t count) {
  alignas(32) double buf[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < count; ++i) buf[i] = p[i];
  return _mm256_load_pd(buf);
}

inline void store_partial(double* p, __m256d v, std::size_t count) {
  alignas(32) double buf[4];
  _mm256_store_pd(buf, v);
  for (std::size_t i = 0; i < count; ++i) p[i] = buf[i];
}

void exp_n(const double* in, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, exp4(_mm256_loadu_pd(in + i)));
  if (i < n) store_partial(out + i, exp4(load_partial(in + i, n - i)), n - i);
}

void sigmoid_n(const double* z, double* out, std::size_t n, const Sigmoid& s) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, sigmoid4(_mm256_loadu_pd(z + i), s));
  if (i < n) store_partial(out + i, sigmoid4(load_partial(z + i, n - i), s), n - i);
}

// Accumulates four consecutive rows starting at i, slot by slot.
inline __m256d rows_dot4(const Ell& m, const double* x, std::size_t i) {
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t slot = 0; slot < m.width; ++slot) {
    const std::size_t e = slot * m.rows + i;
    const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(m.cols + e));
    const __m256d xv = _mm256_i32gather_pd(x, idx, 8);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(m.vals + e), xv));
  }
  return acc;
}

inline __m256d rows_dot_tail(const Ell& m, const double* x, std::size_t i, std::size_t count) {
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t slot = 0; slot < m.width; ++slot) {
    const std::size_t e = slot * m.rows + i;
    alignas(32) double xs[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t l = 0; l < count; ++l) xs[l] = x[m.cols[e + l]];
    acc = _mm256_add_pd(acc, _mm256_mul_pd(load_partial(m.vals + e, count), _mm256_load_pd(xs)));
  }
  return acc;
}

void ell_matvec(const Ell& m, const double* x, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= m.rows; i += 4) _mm256_storeu_pd(out + i, rows_dot4(m, x, i));
  if (i < m.rows) store_partial(out + i, rows_dot_tail(m, x, i, m.rows - i), m.rows - i);
}

void reservoir_update(const Ell& m, const double* x, const double* drive, const Sigmoid& s,
                      double* out) {
  std::size_t i = 0;
  for (; i + 4 <= m.rows; i += 4) {
    const __m256d z = _mm256_add_pd(rows_dot4(m, x, i), _mm256_loadu_pd(drive + i));
    _mm256_storeu_pd(out + i, sigmoid4(z, s));
  }
  if (i < m.rows) {
    const std::size_t rest = m.rows - i;
    const __m256d z = _mm256_add_pd(rows_dot_tail(m, x, i, rest), load_partial(drive + i, rest));
    store_partial(out + i, sigmoid4(z, s), rest);
  }
}

}  // namespace

const Table& avx2_table() {
  static const Table table{"avx2", &exp_n, &sigmoid_n, &ell_matvec, &reservoir_update};
  return table;
}

}  // namespace modesn::kernels::detail
