#include "modesn/topology.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <unordered_map>
#include <utility>

#include "modesn/rng.hpp"

namespace modesn {

// ---------------------------------------------------------------------------
// ModularGraphSpec

ModularGraphSpec ModularGraphSpec::equal_communities(std::size_t n_nodes, std::size_t n_communities,
                                                     std::size_t node_degree, double mu,
                                                     std::uint64_t rng_seed) {
  if (n_communities == 0 || n_nodes % n_communities != 0) {
    throw std::invalid_argument("n_nodes must be a positive multiple of n_communities");
  }
  ModularGraphSpec spec;
  spec.community_sizes.assign(n_communities, n_nodes / n_communities);
  spec.node_degree = node_degree;
  spec.mu = mu;
  spec.rng_seed = rng_seed;
  return spec;
}

std::size_t ModularGraphSpec::n_nodes() const {
  return std::accumulate(community_sizes.begin(), community_sizes.end(), std::size_t{0});
}

void ModularGraphSpec::validate() const {
  if (community_sizes.empty()) throw std::invalid_argument("at least one community is required");
  if (std::ranges::find(community_sizes, std::size_t{0}) != community_sizes.end()) {
    throw std::invalid_argument("community sizes must be positive");
  }
  if (!(mu >= 0.0 && mu < 1.0)) throw std::invalid_argument("mu must lie in [0, 1)");
  if (node_degree == 0) throw std::invalid_argument("node_degree must be positive");
  const std::size_t n = n_nodes();
  if (n > 0xffffffffu) throw std::invalid_argument("too many nodes");
  if (node_degree >= n) throw std::invalid_argument("node_degree must be below n_nodes");
  if ((n * node_degree) % 2 != 0) {
    throw std::invalid_argument("n_nodes * node_degree must be even");
  }
  const std::size_t smallest = *std::ranges::min_element(community_sizes);
  if (mu == 0.0 && node_degree >= smallest) {
    throw std::invalid_argument("node_degree must be below the smallest community size when mu == 0");
  }
}

// ---------------------------------------------------------------------------
// WeightedNetwork

WeightedNetwork::WeightedNetwork(std::size_t n_nodes, std::vector<std::uint32_t> community_of,
                                 std::vector<Edge> edges)
    : n_nodes_(n_nodes), community_of_(std::move(community_of)), edges_(std::move(edges)) {
  if (community_of_.size() != n_nodes_) {
    throw std::invalid_argument("community assignment must cover every node");
  }
  for (const std::uint32_t c : community_of_) {
    n_communities_ = std::max<std::size_t>(n_communities_, std::size_t{c} + 1);
  }
  std::ranges::sort(edges_, [](const Edge& a, const Edge& b) {
    return std::pair(a.source, a.target) < std::pair(b.source, b.target);
  });
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    if (e.source >= n_nodes_ || e.target >= n_nodes_) {
      throw std::invalid_argument("edge endpoint out of range");
    }
    if (i > 0 && edges_[i - 1].source == e.source && edges_[i - 1].target == e.target) {
      throw std::invalid_argument("duplicate directed edge");
    }
  }
}

std::size_t WeightedNetwork::community_size(std::uint32_t community) const {
  return static_cast<std::size_t>(std::ranges::count(community_of_, community));
}

std::vector<std::uint32_t> WeightedNetwork::members(std::uint32_t community) const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < n_nodes_; ++i) {
    if (community_of_[i] == community) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> WeightedNetwork::degrees() const {
  std::vector<std::size_t> deg(n_nodes_, 0);
  for (const Edge& e : edges_) ++deg[e.source];
  return deg;
}

WeightedNetwork WeightedNetwork::with_weights(std::span<const double> weights) const {
  if (weights.size() != edges_.size()) throw std::invalid_argument("one weight per edge required");
  WeightedNetwork out = *this;
  for (std::size_t i = 0; i < weights.size(); ++i) out.edges_[i].weight = weights[i];
  return out;
}

WeightedNetwork WeightedNetwork::scaled(double factor) const {
  WeightedNetwork out = *this;
  for (Edge& e : out.edges_) e.weight *= factor;
  return out;
}

Eigen::MatrixXd WeightedNetwork::dense() const {
  const auto n = static_cast<Eigen::Index>(n_nodes_);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : edges_) w(e.target, e.source) = e.weight;
  return w;
}

kernels::EllMatrix WeightedNetwork::ell() const {
  std::vector<std::size_t> in_degree(n_nodes_, 0);
  for (const Edge& e : edges_) ++in_degree[e.target];
  const std::size_t width =
      in_degree.empty() ? 0 : *std::ranges::max_element(in_degree);
  kernels::EllMatrix m(n_nodes_, std::max<std::size_t>(n_nodes_, 1), width);
  std::vector<std::size_t> fill(n_nodes_, 0);
  // edges_ is sorted by source, so each row receives its entries in source order.
  for (const Edge& e : edges_) m.set(e.target, fill[e.target]++, e.source, e.weight);
  return m;
}

// ---------------------------------------------------------------------------
// Generation

namespace {

struct Partition {
  std::vector<std::uint32_t> community_of;
  std::vector<std::vector<std::uint32_t>> members;
};

Partition partition_of(const ModularGraphSpec& spec) {
  Partition p;
  p.members.resize(spec.n_communities());
  std::uint32_t node = 0;
  for (std::uint32_t c = 0; c < spec.n_communities(); ++c) {
    for (std::size_t j = 0; j < spec.community_sizes[c]; ++j) {
      p.community_of.push_back(c);
      p.members[c].push_back(node++);
    }
  }
  return p;
}

/// Splits every node's stubs into inter-community and intra-community stubs so
/// that the inter stubs total exactly 2 * n_inter_edges, every community's intra
/// stub count is even, and no community holds more than half of the inter stubs
/// (otherwise they could not all be matched across communities).
class StubAllocator {
 public:
  StubAllocator(const ModularGraphSpec& spec, const Partition& part, Rng& rng)
      : spec_(spec), part_(part), rng_(rng) {
    const auto n = part.community_of.size();
    const auto d = static_cast<long>(spec.node_degree);
    lo_.resize(n);
    hi_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto size = static_cast<long>(spec.community_sizes[part.community_of[i]]);
      lo_[i] = std::max(0L, d - (size - 1));
      hi_[i] = spec.n_communities() > 1 ? d : 0;
    }
  }

  std::optional<std::vector<long>> allocate(long n_inter_edges) {
    const auto n = part_.community_of.size();
    inter_.assign(n, 0);
    const double per_node = 2.0 * static_cast<double>(n_inter_edges) / static_cast<double>(n);
    const double base = std::floor(per_node);
    for (std::size_t i = 0; i < n; ++i) {
      long v = static_cast<long>(base) + (rng_.bernoulli(per_node - base) ? 1 : 0);
      inter_[i] = std::clamp(v, lo_[i], hi_[i]);
    }
    if (!hit_total(2 * n_inter_edges)) return std::nullopt;
    if (!fix_parity()) return std::nullopt;
    if (!balance(n_inter_edges)) return std::nullopt;
    return inter_;
  }

 private:
  bool hit_total(long target) {
    long total = std::accumulate(inter_.begin(), inter_.end(), 0L);
    std::vector<std::size_t> order(inter_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng_.shuffle(order);
    while (total != target) {
      bool progressed = false;
      for (const std::size_t i : order) {
        if (total > target && inter_[i] > lo_[i]) {
          --inter_[i];
          --total;
          progressed = true;
        } else if (total < target && inter_[i] < hi_[i]) {
          ++inter_[i];
          ++total;
          progressed = true;
        }
        if (total == target) break;
      }
      if (!progressed) return false;
    }
    return true;
  }

  long community_inter(std::size_t c) const {
    long t = 0;
    for (const auto i : part_.members[c]) t += inter_[i];
    return t;
  }

  bool community_odd(std::size_t c) const {
    const long stubs = static_cast<long>(spec_.community_sizes[c] * spec_.node_degree);
    return ((stubs - community_inter(c)) & 1L) != 0;
  }

  // Moves `delta` (+1 or -1) inter stubs onto a random eligible node of community c.
  bool shift(std::size_t c, long delta) {
    std::vector<std::uint32_t> eligible;
    for (const auto i : part_.members[c]) {
      if ((delta > 0 && inter_[i] < hi_[i]) || (delta < 0 && inter_[i] > lo_[i])) {
        eligible.push_back(i);
      }
    }
    if (eligible.empty()) return false;
    inter_[eligible[rng_.below(eligible.size())]] += delta;
    return true;
  }

  bool fix_parity() {
    std::vector<std::size_t> odd;
    for (std::size_t c = 0; c < spec_.n_communities(); ++c) {
      if (community_odd(c)) odd.push_back(c);
    }
    rng_.shuffle(odd);
    // The total intra stub count is even, so odd communities come in pairs.
    for (std::size_t p = 0; p + 1 < odd.size(); p += 2) {
      const std::size_t a = odd[p];
      const std::size_t b = odd[p + 1];
      if (shift(a, +1)) {
        if (shift(b, -1)) continue;
        shift(a, -1);
      }
      if (shift(a, -1)) {
        if (shift(b, +1)) continue;
        shift(a, +1);
      }
      return false;
    }
    return odd.size() % 2 == 0;
  }

  bool balance(long n_inter_edges) {
    const std::size_t n_comm = spec_.n_communities();
    for (std::size_t guard = 0; guard < 4 * inter_.size() + 16; ++guard) {
      std::size_t c_max = 0;
      std::size_t c_min = 0;
      std::vector<long> totals(n_comm);
      for (std::size_t c = 0; c < n_comm; ++c) {
        totals[c] = community_inter(c);
        if (totals[c] > totals[c_max]) c_max = c;
        if (totals[c] < totals[c_min]) c_min = c;
      }
      if (totals[c_max] <= n_inter_edges) return true;
      // Two stubs at a time keeps both communities' parity.
      if (totals[c_max] - totals[c_min] < 4) return false;
      for (int rep = 0; rep < 2; ++rep) {
        if (!shift(c_max, -1) || !shift(c_min, +1)) return false;
      }
    }
    return false;
  }

  const ModularGraphSpec& spec_;
  const Partition& part_;
  Rng& rng_;
  std::vector<long> lo_;
  std::vector<long> hi_;
  std::vector<long> inter_;
};

std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) {
  if (a > b) std::swap(a, b);
  return (std::uint64_t{a} << 32) | b;
}

/// Undirected multigraph produced by stub matching, repaired into a simple
/// graph by degree-preserving swaps between edges of the same pool.
class Wiring {
 public:
  Wiring(const Partition& part, Rng& rng) : part_(part), rng_(rng) {}

  void match(std::vector<std::uint32_t> stubs, std::size_t pool) {
    rng_.shuffle(stubs);
    for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
      edges_.push_back({stubs[i], stubs[i + 1]});
      pool_of_.push_back(pool);
      ++multiplicity_[pair_key(stubs[i], stubs[i + 1])];
    }
  }

  void set_inter_pool(std::size_t pool) { inter_pool_ = pool; }

  void repair(std::size_t max_attempts) {
    std::vector<std::vector<std::size_t>> by_pool;
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      if (pool_of_[e] >= by_pool.size()) by_pool.resize(pool_of_[e] + 1);
      by_pool[pool_of_[e]].push_back(e);
    }
    std::vector<std::size_t> pending;
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      if (bad(e)) pending.push_back(e);
    }
    std::size_t attempts = 0;
    const std::size_t shake_after = edges_.size();
    while (!pending.empty()) {
      const std::size_t slot = rng_.below(pending.size());
      const std::size_t e = pending[slot];
      if (!bad(e)) {
        pending[slot] = pending.back();
        pending.pop_back();
        continue;
      }
      if (++attempts > max_attempts) {
        throw GraphGenerationError("could not remove self-loops and multi-edges after " +
                                       std::to_string(max_attempts) + " swap attempts",
                                   attempts - 1);
      }
      const auto& pool = by_pool[pool_of_[e]];
      // A stuck configuration (e.g. one same-community bridge per side whose
      // only fixing swap would duplicate an edge) needs the rest of the pool
      // to move first, so after a while interleave swaps between good edges.
      if (attempts > shake_after && rng_.bernoulli(0.5)) {
        const std::size_t g = pool[rng_.below(pool.size())];
        const std::size_t h = pool[rng_.below(pool.size())];
        if (g != h && !bad(g) && !bad(h)) try_swap(g, h);
        continue;
      }
      const std::size_t f = pool[rng_.below(pool.size())];
      if (f != e) try_swap(e, f);
    }
  }

  const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges() const { return edges_; }

 private:
  bool valid_new(std::uint32_t a, std::uint32_t b, std::size_t pool) const {
    if (a == b) return false;
    if (pool == inter_pool_ && part_.community_of[a] == part_.community_of[b]) return false;
    const auto it = multiplicity_.find(pair_key(a, b));
    return it == multiplicity_.end() || it->second == 0;
  }

  bool bad(std::size_t e) const {
    const auto [a, b] = edges_[e];
    if (a == b) return true;
    if (pool_of_[e] == inter_pool_ && part_.community_of[a] == part_.community_of[b]) return true;
    return multiplicity_.at(pair_key(a, b)) > 1;
  }

  void try_swap(std::size_t e, std::size_t f) {
    auto [a, b] = edges_[e];
    auto [c, d] = edges_[f];
    if (rng_.bernoulli(0.5)) std::swap(c, d);
    const std::size_t pool = pool_of_[e];
    --multiplicity_[pair_key(a, b)];
    --multiplicity_[pair_key(c, d)];
    const bool distinct = pair_key(a, c) != pair_key(b, d);
    if (distinct && valid_new(a, c, pool) && valid_new(b, d, pool)) {
      edges_[e] = {a, c};
      edges_[f] = {b, d};
      ++multiplicity_[pair_key(a, c)];
      ++multiplicity_[pair_key(b, d)];
    } else {
      ++multiplicity_[pair_key(a, b)];
      ++multiplicity_[pair_key(c, d)];
    }
  }

  const Partition& part_;
  Rng& rng_;
  std::size_t inter_pool_ = static_cast<std::size_t>(-1);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges_;
  std::vector<std::size_t> pool_of_;
  std::unordered_map<std::uint64_t, int> multiplicity_;
};

}  // namespace

WeightedNetwork generate_modular_graph(const ModularGraphSpec& spec) {
  spec.validate();
  const Partition part = partition_of(spec);
  const std::size_t n = spec.n_nodes();
  const long n_edges = static_cast<long>(n * spec.node_degree / 2);
  const long target = std::lround(spec.mu * static_cast<double>(n_edges));
  Rng rng(spec.rng_seed);

  // The exact target can be unreachable (e.g. an odd bridge count between two
  // communities of even stub parity); fall back to the nearest feasible count.
  std::optional<std::vector<long>> inter;
  StubAllocator allocator(spec, part, rng);
  for (long offset = 0; offset <= 8 && !inter; ++offset) {
    for (const long sign : {-1L, 1L}) {
      const long m = target + sign * offset;
      if (m < 0 || m > n_edges) continue;
      inter = allocator.allocate(m);
      if (inter || offset == 0) break;
    }
  }
  if (!inter) {
    throw GraphGenerationError("no feasible inter-community stub allocation for mu = " +
                                   std::to_string(spec.mu),
                               0);
  }

  Wiring wiring(part, rng);
  const std::size_t inter_pool = spec.n_communities();
  wiring.set_inter_pool(inter_pool);
  for (std::size_t c = 0; c < spec.n_communities(); ++c) {
    std::vector<std::uint32_t> stubs;
    for (const auto i : part.members[c]) {
      stubs.insert(stubs.end(), static_cast<std::size_t>(spec.node_degree - (*inter)[i]), i);
    }
    wiring.match(std::move(stubs), c);
  }
  std::vector<std::uint32_t> bridge_stubs;
  for (std::uint32_t i = 0; i < n; ++i) {
    bridge_stubs.insert(bridge_stubs.end(), static_cast<std::size_t>((*inter)[i]), i);
  }
  wiring.match(std::move(bridge_stubs), inter_pool);
  wiring.repair(100 * static_cast<std::size_t>(n_edges));

  std::vector<Edge> directed;
  directed.reserve(2 * wiring.edges().size());
  for (const auto& [a, b] : wiring.edges()) {
    directed.push_back({a, b, 0.0});
    directed.push_back({b, a, 0.0});
  }
  return WeightedNetwork(n, part.community_of, std::move(directed));
}

void WeightParams::validate() const {
  if (!(w_min < w_max)) throw std::invalid_argument("w_min must be below w_max");
  if (!(weight_scale >= 0.0)) throw std::invalid_argument("weight_scale must be non-negative");
}

WeightedNetwork assign_weights(const WeightedNetwork& network, const WeightParams& params,
                               std::uint64_t rng_seed) {
  params.validate();
  Rng rng(rng_seed);
  const auto edges = network.edges();
  std::vector<double> weights(edges.size());
  std::unordered_map<std::uint64_t, double> drawn;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    if (params.symmetric) {
      const auto key = pair_key(e.source, e.target);
      if (const auto it = drawn.find(key); it != drawn.end()) {
        weights[i] = it->second;
        continue;
      }
      weights[i] = rng.uniform(params.w_min, params.w_max) * params.weight_scale;
      drawn.emplace(key, weights[i]);
    } else {
      weights[i] = rng.uniform(params.w_min, params.w_max) * params.weight_scale;
    }
  }
  return network.with_weights(weights);
}

double measured_mu(const WeightedNetwork& network) {
  std::size_t total = 0;
  std::size_t inter = 0;
  const auto community = network.community_of();
  std::unordered_map<std::uint64_t, bool> seen;
  for (const Edge& e : network.edges()) {
    if (!seen.emplace(pair_key(e.source, e.target), true).second) continue;
    ++total;
    if (community[e.source] != community[e.target]) ++inter;
  }
  return total == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(total);
}

SpectrumReport spectrum(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() == 0 || matrix.rows() != matrix.cols()) {
    throw std::invalid_argument("spectrum: a non-empty square matrix is required");
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver;
  solver.setMaxIterations(std::max<Eigen::Index>(10000, 40 * matrix.rows()));
  solver.compute(matrix, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("spectrum: eigenvalue iteration did not converge");
  }
  std::vector<double> magnitudes;
  magnitudes.reserve(static_cast<std::size_t>(matrix.rows()));
  for (const auto& lambda : solver.eigenvalues()) magnitudes.push_back(std::abs(lambda));
  std::ranges::sort(magnitudes, std::greater<>());
  SpectrumReport report;
  report.lambda1_abs = magnitudes[0];
  report.lambda2_abs = magnitudes.size() > 1 ? magnitudes[1] : 0.0;
  report.spectral_gap = report.lambda1_abs - report.lambda2_abs;
  return report;
}

SpectrumReport spectrum(const WeightedNetwork& network) { return spectrum(network.dense()); }

WeightedNetwork rescale_to_spectral_radius(const WeightedNetwork& network, double rho_target) {
  if (!(rho_target > 0.0)) throw std::invalid_argument("rho_target must be positive");
  const double lambda1 = spectrum(network).lambda1_abs;
  if (!(lambda1 > 0.0)) {
    throw std::domain_error("cannot rescale a matrix whose spectral radius is zero");
  }
  return network.scaled(rho_target / lambda1);
}

}  // namespace modesn
