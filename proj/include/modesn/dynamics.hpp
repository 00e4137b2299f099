// Driven spreading to equilibrium and autonomous attractor enumeration.
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "modesn/reservoir.hpp"
#include "modesn/tasks.hpp"
#include "modesn/topology.hpp"

namespace modesn {

struct CycleDetection {
  double quantum = 1e-6;
  std::size_t max_transient = 2000;
  std::size_t max_period = 500;

  void validate() const;
};

struct EquilibriumResult {
  Eigen::VectorXd state;
  /// Equals `state` for fixed points; period average when a cycle was found.
  Eigen::VectorXd mean_state;
  std::size_t t_e = 0;
  bool converged = false;
  /// 0 unless the run ended on a detected cycle.
  std::size_t period = 0;
};

/// Iterates x <- f(W x + W_in u) with constant u until the max-norm step
/// falls below eps_eq. If max_steps is reached first, the trajectory is
/// continued to look for a cycle and the one-period average is reported.
EquilibriumResult run_to_equilibrium(const Reservoir& reservoir, std::span<const double> input,
                                     const Eigen::VectorXd& x0, double eps_eq,
                                     std::size_t max_steps, const CycleDetection& cycles = {});

struct ActivationProfile {
  std::vector<double> community;
  double total = 0.0;
  std::size_t t_e = 0;
  bool converged = false;
};

/// Mean state per community and the size-weighted total.
ActivationProfile activation_profile(const WeightedNetwork& network, const Eigen::VectorXd& state);

enum class SpreadingKind { two_community, distributed };

std::string to_string(SpreadingKind kind);
SpreadingKind parse_spreading_kind(const std::string& text);

struct SpreadingConfig {
  SpreadingKind kind = SpreadingKind::two_community;
  double r_sig = 0.3;
  double input_value = 1.0;
  double w_min_in = -0.2;
  double w_max_in = 1.0;
  double input_gain = 1.0;
  double eps_eq = 1e-6;
  std::size_t max_steps = 1000;
  /// Report activation minus the zero-input equilibrium.
  bool subtract_baseline = false;
  /// Stimulated community for the two-community kind.
  std::uint32_t seed_community = 0;
  ActivationParams activation;
  CycleDetection cycles;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

struct SpreadingOutcome {
  ActivationProfile profile;
  /// Zero-input equilibrium from the zero state.
  ActivationProfile baseline;
};

/// One scalar input channel held at input_value. Its targets are r_sig of the
/// seed community (two_community) or r_sig of all nodes (distributed).
SpreadingOutcome run_spreading(const WeightedNetwork& network, const SpreadingConfig& cfg);

struct SpreadingExperiment {
  std::size_t n_nodes = 500;
  std::size_t n_communities = 2;
  std::size_t node_degree = 6;
  WeightParams weights;
  SpreadingConfig spreading;
  std::size_t realizations = 48;
  std::uint64_t master_seed = 0;
  std::size_t workers = 1;
};

struct PhaseCell {
  double mu = 0.0;
  double r_sig = 0.0;
  std::vector<double> community_mean;
  std::vector<double> community_std;
  double total_mean = 0.0;
  double total_std = 0.0;
  double baseline_total_mean = 0.0;
  std::vector<double> baseline_community_mean;
  double t_e_mean = 0.0;
  std::size_t n_samples = 0;
};

/// Realization r of cell (i_mu, i_rsig) uses derive_seed(master, i_mu * |r_sigs| + i_rsig, r).
std::vector<PhaseCell> spreading_phase_diagram(std::span<const double> mus,
                                               std::span<const double> r_sigs,
                                               const SpreadingExperiment& exp);

/// Two equal communities, input into community 0.
std::vector<PhaseCell> two_community_experiment(std::span<const double> mus,
                                                std::span<const double> r_sigs,
                                                SpreadingExperiment exp);

/// Equal communities, input on random nodes network-wide.
std::vector<PhaseCell> distributed_input_experiment(std::span<const double> mus,
                                                    std::span<const double> r_sigs,
                                                    SpreadingExperiment exp);

/// Long format: one row per community plus a "total" row per cell.
void write_phase_diagram(std::ostream& out, std::span<const PhaseCell> cells);

enum class AttractorKind { fixed_point, limit_cycle };

struct Attractor {
  AttractorKind kind = AttractorKind::fixed_point;
  std::size_t period = 1;
  std::size_t basin_size = 0;
  /// Continuous state at the canonical start of the cycle.
  Eigen::VectorXd representative;
  /// Quantized states in canonical order, one entry per step of the cycle.
  std::vector<std::vector<std::int64_t>> cycle;
};

struct AttractorSummary {
  std::vector<Attractor> attractors;
  /// Attractor index per probed initial condition, or -1 if unresolved.
  std::vector<std::ptrdiff_t> assignment;
  std::size_t n_unresolved = 0;

  std::size_t n_unique() const { return attractors.size(); }
  std::size_t n_probed() const { return assignment.size(); }
  std::size_t n_fixed_points() const;
  std::size_t n_limit_cycles() const;
};

/// Quantized cycle of the zero-input dynamics reached from x0, in canonical
/// rotation, or nullopt if no recurrence appears within the bounds.
struct DetectedCycle {
  Eigen::VectorXd representative;
  std::vector<std::vector<std::int64_t>> cycle;
  std::size_t transient = 0;
};
std::optional<DetectedCycle> find_cycle(const Reservoir& reservoir, std::span<const double> input,
                                        const Eigen::VectorXd& x0, const CycleDetection& cfg);

/// Runs the autonomous dynamics from every initial condition and merges
/// identical cycles. Per-condition work runs on up to `workers` threads.
AttractorSummary enumerate_attractors(const Reservoir& reservoir,
                                      std::span<const Eigen::VectorXd> initial_conditions,
                                      const CycleDetection& cfg = {}, std::size_t workers = 1);

/// Replays `attractor` from its representative and checks every step against
/// the stored quantized cycle within one quantum.
bool replay_cycle(const Reservoir& reservoir, const Attractor& attractor, double quantum);

/// Post-sequence states: drive from zero with each sequence, no delay or cue.
std::vector<Eigen::VectorXd> sequence_initial_conditions(const Reservoir& reservoir,
                                                         std::span<const RecallSequence> sequences,
                                                         std::size_t seq_dims);

struct AttractorExperimentConfig {
  RecallTaskConfig recall;
  CycleDetection cycles;
};

/// Recall-task reservoir on `network`; probes every generated sequence.
AttractorSummary run_attractor_probe(const WeightedNetwork& network,
                                     const AttractorExperimentConfig& cfg, std::size_t workers = 1);

}  // namespace modesn
