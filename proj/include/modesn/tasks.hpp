// Memory benchmarks: delayed-input memory capacity and sequence recall.
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "modesn/readout.hpp"
#include "modesn/reservoir.hpp"
#include "modesn/topology.hpp"

namespace modesn {

struct MCTaskConfig {
  std::size_t washout = 500;
  std::size_t train_len = 1500;
  std::size_t validation_len = 1500;
  std::size_t max_delay = 100;
  double r_sig = 0.3;
  double w_min_in = -0.2;
  double w_max_in = 1.0;
  double input_gain = 1.0;
  ActivationParams activation;
  ReadoutOptions readout;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

struct MCResult {
  /// r^2 on the validation stream for delays 1..max_delay.
  std::vector<double> mc_k;
  /// Same readouts scored on the training stream.
  std::vector<double> mc_k_train;
  double mc = 0.0;
  double mc_train = 0.0;
  /// Mean state over the validation window.
  double mean_activation = 0.0;
};

/// Input: i.i.d. fair bits. Readout k is trained on u(t - k) over the
/// post-washout training window, then scored on a fresh stream driven from
/// the zero state with its own washout.
MCResult run_mc_task(const WeightedNetwork& network, const MCTaskConfig& cfg);

/// Active input dimension at each step.
using RecallSequence = std::vector<std::uint8_t>;

struct RecallTaskConfig {
  std::size_t seq_dims = 4;
  std::size_t seq_len = 5;
  std::size_t delta_t = 20;
  std::size_t n_sequences = 100;
  bool cue_enabled = true;
  double r_sig = 0.3;
  double input_gain = 2.0;
  double w_min_in = -0.1;
  double w_max_in = 1.0;
  ActivationParams activation;
  ReadoutOptions readout;
  std::uint64_t rng_seed = 0;

  void validate() const;
  /// seq_dims plus the cue channel when enabled.
  std::size_t k_inputs() const { return seq_dims + (cue_enabled ? 1 : 0); }
};

struct RecallResult {
  double fraction_perfect = 0.0;
  std::vector<bool> passed;
};

/// n distinct sequences drawn uniformly without replacement from the
/// dims^len one-hot sequences. Throws if n exceeds that count.
std::vector<RecallSequence> generate_recall_sequences(std::size_t n, std::uint64_t rng_seed,
                                                      std::size_t dims = 4, std::size_t len = 5);

/// The sequence set used by run_recall_task for this config.
std::vector<RecallSequence> recall_sequences(const RecallTaskConfig& cfg);

/// dims x len one-hot bit matrix.
Eigen::MatrixXd sequence_bits(const RecallSequence& seq, std::size_t dims);

/// Input weights for the recall task: seq_dims sequence channels and, when the
/// cue is enabled, a cue channel with its own target set.
InputWeights recall_input_weights(std::size_t n_nodes, const RecallTaskConfig& cfg);

/// State after driving from zero with `seq`, then delta_t silent steps, then
/// the cue pulse (if enabled). Also returns the input of that final step.
struct RecallDrive {
  Eigen::VectorXd state;
  Eigen::VectorXd last_input;
};
RecallDrive drive_recall_sequence(const Reservoir& reservoir, const RecallSequence& seq,
                                  std::size_t seq_dims, std::size_t delta_t, bool cue_enabled);

/// Trains seq_dims * seq_len step readouts on the final [x : u] of every
/// sequence and scores all-or-nothing recall on the same set.
RecallResult run_recall_task(const WeightedNetwork& network, const RecallTaskConfig& cfg);

/// Scores predicted bits against targets column by column.
RecallResult score_recall(const Eigen::MatrixXd& predicted_bits, const Eigen::MatrixXd& target_bits);

}  // namespace modesn
