#include "modesn/rng.hpp"

#include <numeric>
#include <stdexcept>

namespace modesn {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t cell_index,
                          std::uint64_t realization_index) {
  // Each stage is a bijection of the running state, so for a fixed master
  // seed distinct (cell, realization) pairs only collide through the final
  // 64-bit mixing.
  std::uint64_t h = mix64(master_seed);
  h = mix64(h ^ mix64(cell_index + 0x632be59bd9b4e019ULL));
  h = mix64(h ^ mix64(realization_index + 0x85157af5ULL));
  return h;
}

std::uint64_t substream(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed ^ mix64(stream * 0xd1342543de82ef95ULL + 1));
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below: empty range");
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return v % n;
}

std::vector<std::size_t> Rng::sample(std::size_t n, std::size_t count) {
  if (count > n) throw std::invalid_argument("Rng::sample: count exceeds population");
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

}  // namespace modesn
