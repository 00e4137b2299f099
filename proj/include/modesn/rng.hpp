// Portable seeded randomness. Distributions are implemented here rather than
// taken from <random> because the standard leaves their algorithms
// unspecified, and every result in this project must be reproducible from a
// seed alone.
#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace modesn {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Counter-based seed for job (cell, realization) of a sweep.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t cell_index,
                          std::uint64_t realization_index);

/// Independent sub-stream seed, e.g. for the validation input of a task.
std::uint64_t substream(std::uint64_t seed, std::uint64_t stream);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  bool bernoulli(double p) { return uniform() < p; }

  template <class T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  template <class T>
  void shuffle(std::vector<T>& items) {
    shuffle(std::span<T>(items));
  }

  /// `count` distinct values from [0, n), in random order.
  std::vector<std::size_t> sample(std::size_t n, std::size_t count);

 private:
  std::mt19937_64 engine_;
};

}  // namespace modesn

namespace modesn {

/// Per-job seeds for the independent random ingredients of one realization.
struct JobSeeds {
  std::uint64_t graph;
  std::uint64_t weights;
  std::uint64_t task;

  static JobSeeds from(std::uint64_t job_seed) {
    return {substream(job_seed, 11), substream(job_seed, 12), substream(job_seed, 13)};
  }
};

}  // namespace modesn
