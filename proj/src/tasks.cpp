#include "modesn/tasks.hpp"

#include <numeric>
#include <stdexcept>

#include "modesn/rng.hpp"

namespace modesn {
namespace {

enum Stream : std::uint64_t { kInputWeights = 1, kTrainInput = 2, kValidationInput = 3, kCueWeights = 4, kSequences = 5 };

std::vector<std::uint32_t> all_nodes(std::size_t n) {
  std::vector<std::uint32_t> nodes(n);
  std::iota(nodes.begin(), nodes.end(), 0u);
  return nodes;
}

Eigen::RowVectorXd bernoulli_stream(std::size_t length, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::RowVectorXd u(static_cast<Eigen::Index>(length));
  for (Eigen::Index t = 0; t < u.size(); ++t) u[t] = rng.bernoulli(0.5) ? 1.0 : 0.0;
  return u;
}

// Rows [x(t) ; u(t)] for stream columns [first, first + count).
Eigen::MatrixXd design(const StateHistory& states, const Eigen::RowVectorXd& u, Eigen::Index first,
                       Eigen::Index count) {
  Eigen::MatrixXd x(states.rows() + 1, count);
  x.topRows(states.rows()) = states.middleCols(first, count);
  x.bottomRows(1) = u.segment(first, count);
  return x;
}

// Readouts for delays [k_lo, k_hi] trained jointly on columns [first, end).
struct DelayBlock {
  std::size_t k_lo;
  std::size_t k_hi;
  Eigen::Index first;
};

std::vector<DelayBlock> delay_blocks(const MCTaskConfig& cfg) {
  // Delays up to the washout length share one design matrix; longer delays
  // lose their first k columns and are trained one at a time.
  std::vector<DelayBlock> blocks;
  const std::size_t shared = std::min(cfg.washout, cfg.max_delay);
  if (shared >= 1) blocks.push_back({1, shared, static_cast<Eigen::Index>(cfg.washout)});
  for (std::size_t k = shared + 1; k <= cfg.max_delay; ++k) {
    blocks.push_back({k, k, static_cast<Eigen::Index>(k)});
  }
  return blocks;
}

Eigen::MatrixXd delayed_targets(const Eigen::RowVectorXd& u, const DelayBlock& b, Eigen::Index end) {
  const Eigen::Index count = end - b.first;
  Eigen::MatrixXd y(static_cast<Eigen::Index>(b.k_hi - b.k_lo + 1), count);
  for (std::size_t k = b.k_lo; k <= b.k_hi; ++k) {
    y.row(static_cast<Eigen::Index>(k - b.k_lo)) = u.segment(b.first - static_cast<Eigen::Index>(k), count);
  }
  return y;
}

std::vector<double> score_delays(const Eigen::MatrixXd& predicted, const Eigen::MatrixXd& target) {
  std::vector<double> r2(static_cast<std::size_t>(target.rows()));
  for (Eigen::Index k = 0; k < target.rows(); ++k) {
    const Eigen::RowVectorXd t = target.row(k);
    const Eigen::RowVectorXd p = predicted.row(k);
    r2[static_cast<std::size_t>(k)] =
        r_squared(std::span<const double>(t.data(), static_cast<std::size_t>(t.size())),
                  std::span<const double>(p.data(), static_cast<std::size_t>(p.size())));
  }
  return r2;
}

}  // namespace

void MCTaskConfig::validate() const {
  if (train_len == 0) throw std::invalid_argument("mc: train_len must be positive");
  if (max_delay == 0) throw std::invalid_argument("mc: max_delay must be positive");
  if (max_delay >= train_len) throw std::invalid_argument("mc: max_delay must be below train_len");
  if (validation_len <= max_delay) {
    throw std::invalid_argument("mc: validation stream is not longer than max_delay");
  }
  if (!(r_sig > 0.0 && r_sig <= 1.0)) throw std::invalid_argument("mc: r_sig must lie in (0, 1]");
  activation.validate();
}

MCResult run_mc_task(const WeightedNetwork& network, const MCTaskConfig& cfg) {
  cfg.validate();
  const std::size_t n = network.n_nodes();
  const auto targets = all_nodes(n);
  Reservoir reservoir(network,
                      build_input_weights(1, n, targets, cfg.r_sig, cfg.w_min_in, cfg.w_max_in,
                                          cfg.input_gain, substream(cfg.rng_seed, kInputWeights)),
                      cfg.activation);
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));

  const Eigen::RowVectorXd u_train =
      bernoulli_stream(cfg.washout + cfg.train_len, substream(cfg.rng_seed, kTrainInput));
  const StateHistory x_train = reservoir.run(u_train, x0);
  const Eigen::RowVectorXd u_val =
      bernoulli_stream(cfg.washout + cfg.validation_len, substream(cfg.rng_seed, kValidationInput));
  const StateHistory x_val = reservoir.run(u_val, x0);

  MCResult result;
  result.mc_k.reserve(cfg.max_delay);
  result.mc_k_train.reserve(cfg.max_delay);
  const auto end_train = static_cast<Eigen::Index>(cfg.washout + cfg.train_len);
  const auto end_val = static_cast<Eigen::Index>(cfg.washout + cfg.validation_len);
  for (const DelayBlock& block : delay_blocks(cfg)) {
    TrainingSet set{design(x_train, u_train, block.first, end_train - block.first),
                    delayed_targets(u_train, block, end_train)};
    const ReadoutLayer layer = train_readout(set, cfg.readout);
    const auto in_sample = score_delays(layer.W_out * set.X, set.Y);

    const Eigen::Index val_first = std::max<Eigen::Index>(block.first, static_cast<Eigen::Index>(cfg.washout));
    const DelayBlock val_block{block.k_lo, block.k_hi, val_first};
    const Eigen::MatrixXd xv = design(x_val, u_val, val_first, end_val - val_first);
    const auto out_sample = score_delays(layer.W_out * xv, delayed_targets(u_val, val_block, end_val));

    result.mc_k.insert(result.mc_k.end(), out_sample.begin(), out_sample.end());
    result.mc_k_train.insert(result.mc_k_train.end(), in_sample.begin(), in_sample.end());
  }
  result.mc = std::accumulate(result.mc_k.begin(), result.mc_k.end(), 0.0);
  result.mc_train = std::accumulate(result.mc_k_train.begin(), result.mc_k_train.end(), 0.0);
  result.mean_activation =
      x_val.rightCols(static_cast<Eigen::Index>(cfg.validation_len)).mean();
  return result;
}

// ---------------------------------------------------------------------------
// Recall

void RecallTaskConfig::validate() const {
  if (seq_dims == 0 || seq_len == 0) throw std::invalid_argument("recall: empty sequence shape");
  if (seq_dims > 255) throw std::invalid_argument("recall: too many sequence dimensions");
  if (n_sequences == 0) throw std::invalid_argument("recall: n_sequences must be positive");
  if (!(r_sig > 0.0 && r_sig <= 1.0)) throw std::invalid_argument("recall: r_sig must lie in (0, 1]");
  activation.validate();
}

std::vector<RecallSequence> generate_recall_sequences(std::size_t n, std::uint64_t rng_seed,
                                                      std::size_t dims, std::size_t len) {
  if (dims == 0 || len == 0) throw std::invalid_argument("recall sequences: empty shape");
  std::size_t total = 1;
  for (std::size_t i = 0; i < len; ++i) {
    if (total > (std::size_t{1} << 40) / dims) throw std::invalid_argument("recall sequences: space too large");
    total *= dims;
  }
  if (n > total) {
    throw std::invalid_argument("recall sequences: requested " + std::to_string(n) +
                                " distinct sequences but only " + std::to_string(total) + " exist");
  }
  // Sampling indices without replacement makes duplicates impossible.
  Rng rng(rng_seed);
  const auto picks = rng.sample(total, n);
  std::vector<RecallSequence> out;
  out.reserve(n);
  for (std::size_t index : picks) {
    RecallSequence seq(len);
    for (std::size_t pos = 0; pos < len; ++pos) {
      seq[pos] = static_cast<std::uint8_t>(index % dims);
      index /= dims;
    }
    out.push_back(std::move(seq));
  }
  return out;
}

std::vector<RecallSequence> recall_sequences(const RecallTaskConfig& cfg) {
  return generate_recall_sequences(cfg.n_sequences, substream(cfg.rng_seed, kSequences), cfg.seq_dims,
                                   cfg.seq_len);
}

Eigen::MatrixXd sequence_bits(const RecallSequence& seq, std::size_t dims) {
  Eigen::MatrixXd bits = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dims), static_cast<Eigen::Index>(seq.size()));
  for (std::size_t pos = 0; pos < seq.size(); ++pos) {
    if (seq[pos] >= dims) throw std::invalid_argument("sequence symbol out of range");
    bits(seq[pos], static_cast<Eigen::Index>(pos)) = 1.0;
  }
  return bits;
}

InputWeights recall_input_weights(std::size_t n_nodes, const RecallTaskConfig& cfg) {
  const auto targets = all_nodes(n_nodes);
  InputWeights w = build_input_weights(cfg.seq_dims, n_nodes, targets, cfg.r_sig, cfg.w_min_in,
                                       cfg.w_max_in, cfg.input_gain,
                                       substream(cfg.rng_seed, kInputWeights));
  if (cfg.cue_enabled) {
    w = w.concat(build_input_weights(1, n_nodes, targets, cfg.r_sig, cfg.w_min_in, cfg.w_max_in,
                                     cfg.input_gain, substream(cfg.rng_seed, kCueWeights)));
  }
  return w;
}

RecallDrive drive_recall_sequence(const Reservoir& reservoir, const RecallSequence& seq,
                                  std::size_t seq_dims, std::size_t delta_t, bool cue_enabled) {
  const std::size_t n = reservoir.n_nodes();
  const std::size_t k = reservoir.k_inputs();
  if (k != seq_dims + (cue_enabled ? 1 : 0)) {
    throw std::invalid_argument("recall drive: reservoir input dimension does not match the task");
  }
  std::vector<double> x(n, 0.0);
  std::vector<double> next(n);
  std::vector<double> u(k, 0.0);
  auto advance = [&] {
    reservoir.advance(x, u, next);
    x.swap(next);
  };
  for (const auto symbol : seq) {
    std::fill(u.begin(), u.end(), 0.0);
    u[symbol] = 1.0;
    advance();
  }
  std::fill(u.begin(), u.end(), 0.0);
  for (std::size_t t = 0; t < delta_t; ++t) advance();
  if (cue_enabled) {
    u[seq_dims] = 1.0;
    advance();
  } else if (delta_t == 0 && !seq.empty()) {
    u[seq.back()] = 1.0;
  }
  RecallDrive out;
  out.state = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(n));
  out.last_input = Eigen::Map<const Eigen::VectorXd>(u.data(), static_cast<Eigen::Index>(k));
  return out;
}

RecallResult score_recall(const Eigen::MatrixXd& predicted_bits, const Eigen::MatrixXd& target_bits) {
  if (predicted_bits.rows() != target_bits.rows() || predicted_bits.cols() != target_bits.cols()) {
    throw std::invalid_argument("recall scoring: shape mismatch");
  }
  RecallResult result;
  result.passed.resize(static_cast<std::size_t>(target_bits.cols()));
  std::size_t passes = 0;
  for (Eigen::Index j = 0; j < target_bits.cols(); ++j) {
    const bool ok = (predicted_bits.col(j) - target_bits.col(j)).cwiseAbs().maxCoeff() == 0.0;
    result.passed[static_cast<std::size_t>(j)] = ok;
    passes += ok ? 1 : 0;
  }
  result.fraction_perfect = target_bits.cols() == 0
                                ? 0.0
                                : static_cast<double>(passes) / static_cast<double>(target_bits.cols());
  return result;
}

RecallResult run_recall_task(const WeightedNetwork& network, const RecallTaskConfig& cfg) {
  cfg.validate();
  const std::size_t n = network.n_nodes();
  const Reservoir reservoir(network, recall_input_weights(n, cfg), cfg.activation);
  const auto sequences = recall_sequences(cfg);
  const auto features = static_cast<Eigen::Index>(n + cfg.k_inputs());
  const auto bits = static_cast<Eigen::Index>(cfg.seq_dims * cfg.seq_len);
  const auto count = static_cast<Eigen::Index>(sequences.size());
  TrainingSet set{Eigen::MatrixXd(features, count), Eigen::MatrixXd(bits, count)};
  for (Eigen::Index j = 0; j < count; ++j) {
    const auto& seq = sequences[static_cast<std::size_t>(j)];
    const RecallDrive drive = drive_recall_sequence(reservoir, seq, cfg.seq_dims, cfg.delta_t, cfg.cue_enabled);
    set.X.col(j) << drive.state, drive.last_input;
    set.Y.col(j) = sequence_bits(seq, cfg.seq_dims).reshaped();
  }
  const ReadoutLayer layer = train_readout(set, cfg.readout);
  const Eigen::MatrixXd predicted = (layer.W_out * set.X).unaryExpr([](double z) { return readout_step(z); });
  return score_recall(predicted, set.Y);
}

}  // namespace modesn
