#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "modesn/kernels.hpp"
#include "modesn/rng.hpp"

namespace k = modesn::kernels;

namespace {

std::vector<double> random_values(std::size_t n, double lo, double hi, std::uint64_t seed) {
  modesn::Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
  }
  return true;
}

k::EllMatrix random_ell(std::size_t rows, std::size_t width, std::uint64_t seed) {
  modesn::Rng rng(seed);
  k::EllMatrix m(rows, rows, width);
  for (std::size_t r = 0; r < rows; ++r) {
    // Ragged rows: leave some trailing slots empty.
    const std::size_t used = width - rng.below(std::min<std::size_t>(width, 3));
    for (std::size_t s = 0; s < used; ++s) {
      m.set(r, s, static_cast<std::uint32_t>(rng.below(rows)), rng.uniform(-0.2, 1.0));
    }
  }
  return m;
}

}  // namespace

TEST_CASE("exp matches std::exp to a few ulp") {
  for (double x : random_values(20000, -700.0, 700.0, 1)) {
    const double ref = std::exp(x);
    CHECK(std::abs(k::exp_scalar(x) - ref) <= 4e-16 * ref);
  }
  CHECK(k::exp_scalar(0.0) == 1.0);
  CHECK(k::exp_scalar(1.0) == doctest::Approx(2.718281828459045).epsilon(1e-15));
}

TEST_CASE("exp saturates outside the clamp range") {
  CHECK(std::isfinite(k::exp_scalar(1e6)));
  CHECK(k::exp_scalar(-1e6) >= 0.0);
}

TEST_CASE("sigmoid reference values") {
  const k::SigmoidCoeffs p;
  CHECK(k::sigmoid_scalar(0.0, p) == doctest::Approx(1.0 / (1.0 + std::exp(1.0))).epsilon(1e-15));
  CHECK(std::abs(k::sigmoid_scalar(0.1, p) - 0.5) < 1e-15);
  CHECK(k::sigmoid_scalar(1e9, p) == 1.0);
  CHECK(k::sigmoid_scalar(-1e9, p) < 1e-200);
}

TEST_CASE("scalar and avx2 kernels agree bit for bit") {
  if (!k::available(k::Isa::avx2)) {
    MESSAGE("avx2 not available on this CPU; equivalence not exercised");
    return;
  }
  const k::SigmoidCoeffs p{0.9, 1.1, 3.0, 7.0, 0.05};
  for (std::size_t n : {1u, 3u, 4u, 5u, 17u, 64u, 1001u}) {
    CAPTURE(n);
    const auto in = random_values(n, -50.0, 50.0, 10 + n);
    std::vector<double> a(n), b(n);
    k::exp(k::Isa::scalar, in, a);
    k::exp(k::Isa::avx2, in, b);
    CHECK(same_bits(a, b));
    k::sigmoid(k::Isa::scalar, in, a, p);
    k::sigmoid(k::Isa::avx2, in, b, p);
    CHECK(same_bits(a, b));

    const auto m = random_ell(n, 7, 20 + n);
    const auto x = random_values(n, 0.0, 1.0, 30 + n);
    const auto drive = random_values(n, -1.0, 1.0, 40 + n);
    k::matvec(k::Isa::scalar, m, x, a);
    k::matvec(k::Isa::avx2, m, x, b);
    CHECK(same_bits(a, b));
    k::reservoir_update(k::Isa::scalar, m, x, drive, p, a);
    k::reservoir_update(k::Isa::avx2, m, x, drive, p, b);
    CHECK(same_bits(a, b));
  }
}

TEST_CASE("ell matvec matches a dense product") {
  const std::size_t n = 37;
  const auto m = random_ell(n, 5, 3);
  const auto x = random_values(n, -1.0, 1.0, 4);
  std::vector<double> out(n);
  k::matvec(m, x, out);
  for (std::size_t r = 0; r < n; ++r) {
    double ref = 0.0;
    for (std::size_t s = 0; s < m.width(); ++s) ref += m.value_at(r, s) * x[m.col_at(r, s)];
    CHECK(out[r] == doctest::Approx(ref).epsilon(1e-14));
  }
}

TEST_CASE("kernel selection") {
  const auto before = k::active();
  k::select(k::Isa::scalar);
  CHECK(k::active() == k::Isa::scalar);
  CHECK(k::name(k::Isa::scalar) == "scalar");
  k::select(before);
}
