// Modular random graphs with exact degrees and a controlled bridge fraction.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "modesn/kernels.hpp"

namespace modesn {

/// Flat-degree planted partition: every node has `node_degree` undirected
/// neighbours and a fraction `mu` of all edges join different communities.
struct ModularGraphSpec {
  std::vector<std::size_t> community_sizes;
  std::size_t node_degree = 6;
  double mu = 0.0;
  std::uint64_t rng_seed = 0;

  static ModularGraphSpec equal_communities(std::size_t n_nodes, std::size_t n_communities,
                                            std::size_t node_degree, double mu,
                                            std::uint64_t rng_seed);

  std::size_t n_nodes() const;
  std::size_t n_communities() const { return community_sizes.size(); }
  /// Throws std::invalid_argument on a malformed spec.
  void validate() const;
};

/// Raised when a spec passes validation but cannot be wired.
class GraphGenerationError : public std::runtime_error {
 public:
  GraphGenerationError(const std::string& what, std::size_t attempts)
      : std::runtime_error(what), attempts_(attempts) {}
  std::size_t attempts() const { return attempts_; }

 private:
  std::size_t attempts_;
};

struct Edge {
  std::uint32_t source = 0;
  std::uint32_t target = 0;
  double weight = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Directed weighted graph with a community label per node. Edge (s, t, w)
/// is the matrix entry W(t, s) = w, so state flows from s into t. Edges are
/// kept sorted by (source, target); the object is immutable.
class WeightedNetwork {
 public:
  WeightedNetwork() = default;
  /// Throws std::invalid_argument on duplicate edges or bad labels. Self-loops
  /// are accepted here; the generator never produces them.
  WeightedNetwork(std::size_t n_nodes, std::vector<std::uint32_t> community_of,
                  std::vector<Edge> edges);

  std::size_t n_nodes() const { return n_nodes_; }
  std::size_t n_communities() const { return n_communities_; }
  std::span<const std::uint32_t> community_of() const { return community_of_; }
  std::span<const Edge> edges() const { return edges_; }
  std::size_t community_size(std::uint32_t community) const;
  std::vector<std::uint32_t> members(std::uint32_t community) const;

  /// Out-degree of every node; equals the undirected degree for generated graphs.
  std::vector<std::size_t> degrees() const;

  WeightedNetwork with_weights(std::span<const double> weights) const;
  WeightedNetwork scaled(double factor) const;

  Eigen::MatrixXd dense() const;
  /// Row i holds the incoming edges of node i ordered by source.
  kernels::EllMatrix ell() const;

  friend bool operator==(const WeightedNetwork&, const WeightedNetwork&) = default;

 private:
  std::size_t n_nodes_ = 0;
  std::size_t n_communities_ = 0;
  std::vector<std::uint32_t> community_of_;
  std::vector<Edge> edges_;
};

struct WeightParams {
  double w_min = -0.2;
  double w_max = 1.0;
  double weight_scale = 1.0;
  /// One draw per undirected edge instead of one per direction.
  bool symmetric = false;

  void validate() const;
};

struct SpectrumReport {
  double lambda1_abs = 0.0;
  double lambda2_abs = 0.0;
  double spectral_gap = 0.0;
};

/// Topology only; all weights are zero.
WeightedNetwork generate_modular_graph(const ModularGraphSpec& spec);

/// Each directed edge, visited in (source, target) order, gets
/// U(w_min, w_max) * weight_scale.
WeightedNetwork assign_weights(const WeightedNetwork& network, const WeightParams& params,
                               std::uint64_t rng_seed);

/// Fraction of undirected edges whose endpoints lie in different communities.
double measured_mu(const WeightedNetwork& network);

SpectrumReport spectrum(const WeightedNetwork& network);
SpectrumReport spectrum(const Eigen::MatrixXd& matrix);

/// Scales every weight so that the largest eigenvalue magnitude becomes rho_target.
WeightedNetwork rescale_to_spectral_radius(const WeightedNetwork& network, double rho_target);

}  // namespace modesn
