// Sweep configuration: a flat `key = value` text format with list values.
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "modesn/dynamics.hpp"
#include "modesn/tasks.hpp"
#include "modesn/topology.hpp"

namespace modesn {

enum class Experiment { mc, recall, spread_two, spread_many, attractors, spectrum };

std::string to_string(Experiment e);
Experiment parse_experiment(const std::string& text);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SweepConfig {
  Experiment experiment = Experiment::mc;

  std::vector<double> mu{0.2};
  std::vector<double> r_sig{0.3};
  std::vector<double> w_s{1.0};
  std::optional<double> rho_target;
  std::size_t realizations = 1;
  std::uint64_t master_seed = 1;

  // network
  std::size_t n_nodes = 500;
  std::size_t n_communities = 50;
  std::size_t node_degree = 6;
  double w_min = -0.2;
  double w_max = 1.0;
  bool symmetric = false;

  // activation
  double act_a = 1.0;
  double act_b = 1.0;
  double act_c = 1.0;
  double act_k = 10.0;
  double act_d = 0.0;

  // input layer
  double w_min_in = -0.2;
  double w_max_in = 1.0;
  double input_gain = 1.0;

  // memory capacity
  std::size_t washout = 500;
  std::size_t train_len = 1500;
  std::size_t validation_len = 1500;
  std::size_t max_delay = 100;
  double readout_rel_tol = 1e-10;

  // recall and attractors
  std::size_t seq_dims = 4;
  std::size_t seq_len = 5;
  std::size_t delta_t = 20;
  std::size_t n_sequences = 100;
  bool cue = true;

  // spreading
  double input_value = 1.0;
  double eps_eq = 1e-6;
  std::size_t max_steps = 1000;
  bool subtract_baseline = false;

  // cycle detection
  double quantum = 1e-6;
  std::size_t max_transient = 2000;
  std::size_t max_period = 500;

  std::string output;

  /// Throws ConfigError naming the offending key.
  void validate() const;

  /// Assigns one key from its textual value. Throws ConfigError on an unknown
  /// key or an unparsable value.
  void set(const std::string& key, const std::string& value);

  /// Every key in serialization order.
  static const std::vector<std::string>& keys();

  friend bool operator==(const SweepConfig&, const SweepConfig&) = default;

  ActivationParams activation() const;
  WeightParams weight_params(double w_s) const;
  MCTaskConfig mc_task(double r_sig, std::uint64_t seed) const;
  RecallTaskConfig recall_task(double r_sig, std::uint64_t seed) const;
  SpreadingConfig spreading(double r_sig, std::uint64_t seed) const;
  CycleDetection cycles() const;
};

/// Defaults for an experiment at desk scale. The `experiment` key in a file
/// selects the preset that the remaining keys then override.
SweepConfig preset(Experiment e);

/// Grammar, one statement per line:
///   line   := blank | '#' comment | key '=' value [ '#' comment ]
///   value  := item (',' item)*
/// Keys are the field names of SweepConfig. If `experiment` appears it must
/// come first, since it resets every other key to that experiment's preset.
SweepConfig parse_config(std::istream& in, const std::string& origin = "<config>");
SweepConfig load_config(const std::string& path);

/// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const SweepConfig& cfg);

}  // namespace modesn
