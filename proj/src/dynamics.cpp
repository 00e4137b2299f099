#include "modesn/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "modesn/network_io.hpp"
#include "modesn/parallel.hpp"
#include "modesn/rng.hpp"

namespace modesn {
namespace {

using Quantized = std::vector<std::int64_t>;

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

void quantize(std::span<const double> x, double quantum, Quantized& out) {
  out.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::llround(x[i] / quantum);
}

std::uint64_t hash_of(const Quantized& q) {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ q.size();
  for (const auto v : q) h = mix64(h ^ static_cast<std::uint64_t>(v));
  return h;
}

Eigen::VectorXd to_vector(std::span<const double> x) {
  return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
}

// Index of the lexicographically smallest rotation.
std::size_t minimal_rotation(const std::vector<Quantized>& cycle) {
  const std::size_t p = cycle.size();
  std::size_t best = 0;
  for (std::size_t r = 1; r < p; ++r) {
    for (std::size_t j = 0; j < p; ++j) {
      const auto& a = cycle[(r + j) % p];
      const auto& b = cycle[(best + j) % p];
      if (a != b) {
        if (a < b) best = r;
        break;
      }
    }
  }
  return best;
}

std::string cycle_key(const std::vector<Quantized>& cycle) {
  std::string key;
  for (const auto& q : cycle) {
    key.append(reinterpret_cast<const char*>(q.data()), q.size() * sizeof(std::int64_t));
    key.push_back('|');
  }
  return key;
}

// Steps the state `p` times and returns the max-norm distance to the start.
double period_return(const Reservoir& r, std::span<const double> u, std::vector<double>& x,
                     std::vector<double>& scratch, std::size_t p) {
  const std::vector<double> start = x;
  for (std::size_t j = 0; j < p; ++j) {
    r.advance(x, u, scratch);
    x.swap(scratch);
  }
  return max_abs_diff(x, start);
}

double sample_std(double sum, double sum_sq, std::size_t n) {
  if (n < 2) return 0.0;
  const double mean = sum / static_cast<double>(n);
  const double var = (sum_sq - static_cast<double>(n) * mean * mean) / static_cast<double>(n - 1);
  return std::sqrt(std::max(0.0, var));
}

}  // namespace

void CycleDetection::validate() const {
  if (!(quantum > 0.0)) throw std::invalid_argument("cycle detection: quantum must be positive");
  if (max_period == 0) throw std::invalid_argument("cycle detection: max_period must be positive");
}

std::optional<DetectedCycle> find_cycle(const Reservoir& reservoir, std::span<const double> input,
                                        const Eigen::VectorXd& x0, const CycleDetection& cfg) {
  cfg.validate();
  const std::size_t n = reservoir.n_nodes();
  std::vector<double> x(x0.data(), x0.data() + n);
  std::vector<double> next(n);
  Quantized q;
  std::unordered_map<std::uint64_t, std::size_t> seen;
  quantize(x, cfg.quantum, q);
  seen.emplace(hash_of(q), 0);

  const std::size_t horizon = cfg.max_transient + cfg.max_period;
  for (std::size_t t = 1; t <= horizon; ++t) {
    reservoir.advance(x, input, next);
    x.swap(next);
    quantize(x, cfg.quantum, q);
    const std::uint64_t h = hash_of(q);
    const auto it = seen.find(h);
    if (it == seen.end() || t - it->second > cfg.max_period) {
      seen[h] = t;
      continue;
    }
    const std::size_t p = t - it->second;

    // Let the orbit settle well below the grid before reading it off, so that
    // equal attractors reached from different sides quantize identically.
    std::vector<double> settled = x;
    const double settle_tol = cfg.quantum * 1e-6;
    for (std::size_t spent = 0; spent < cfg.max_transient; spent += p) {
      if (period_return(reservoir, input, settled, next, p) <= settle_tol) break;
    }

    std::vector<Quantized> cycle(p);
    std::vector<Eigen::VectorXd> states(p);
    std::vector<double> y = settled;
    for (std::size_t j = 0; j < p; ++j) {
      quantize(y, cfg.quantum, cycle[j]);
      states[j] = to_vector(y);
      reservoir.advance(y, input, next);
      y.swap(next);
    }
    Quantized back;
    quantize(y, cfg.quantum, back);
    if (back != cycle[0]) {
      // Hash collision or an orbit still drifting across grid cells.
      seen[h] = t;
      continue;
    }
    // A recurrence at p may be a multiple of the true period.
    std::size_t period = p;
    for (std::size_t d = 1; d < p; ++d) {
      if (p % d != 0) continue;
      bool repeats = true;
      for (std::size_t j = 0; j + d < p && repeats; ++j) repeats = cycle[j] == cycle[j + d];
      if (repeats) {
        period = d;
        break;
      }
    }
    cycle.resize(period);
    states.resize(period);
    const std::size_t r = minimal_rotation(cycle);
    std::rotate(cycle.begin(), cycle.begin() + static_cast<std::ptrdiff_t>(r), cycle.end());
    DetectedCycle out;
    out.representative = std::move(states[r]);
    out.cycle = std::move(cycle);
    out.transient = it->second;
    return out;
  }
  return std::nullopt;
}

EquilibriumResult run_to_equilibrium(const Reservoir& reservoir, std::span<const double> input,
                                     const Eigen::VectorXd& x0, double eps_eq,
                                     std::size_t max_steps, const CycleDetection& cycles) {
  if (!(eps_eq > 0.0)) throw std::invalid_argument("run_to_equilibrium: eps_eq must be positive");
  const std::size_t n = reservoir.n_nodes();
  if (static_cast<std::size_t>(x0.size()) != n) {
    throw std::invalid_argument("run_to_equilibrium: initial state has the wrong size");
  }
  std::vector<double> x(x0.data(), x0.data() + n);
  std::vector<double> next(n);
  EquilibriumResult res;
  for (std::size_t t = 1; t <= max_steps; ++t) {
    reservoir.advance(x, input, next);
    const double step = max_abs_diff(next, x);
    x.swap(next);
    if (step < eps_eq) {
      res.state = to_vector(x);
      res.mean_state = res.state;
      res.t_e = t;
      res.converged = true;
      return res;
    }
  }
  res.state = to_vector(x);
  res.mean_state = res.state;
  res.t_e = max_steps;
  if (const auto cycle = find_cycle(reservoir, input, res.state, cycles)) {
    const std::size_t p = cycle->cycle.size();
    std::vector<double> y(cycle->representative.data(), cycle->representative.data() + n);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < p; ++j) {
      sum += to_vector(y);
      reservoir.advance(y, input, next);
      y.swap(next);
    }
    res.mean_state = sum / static_cast<double>(p);
    res.period = p;
  }
  return res;
}

ActivationProfile activation_profile(const WeightedNetwork& network, const Eigen::VectorXd& state) {
  const std::size_t n = network.n_nodes();
  if (static_cast<std::size_t>(state.size()) != n) {
    throw std::invalid_argument("activation_profile: state has the wrong size");
  }
  const auto labels = network.community_of();
  std::vector<double> sum(network.n_communities(), 0.0);
  std::vector<std::size_t> size(network.n_communities(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    sum[labels[i]] += state[static_cast<Eigen::Index>(i)];
    ++size[labels[i]];
  }
  ActivationProfile p;
  p.community.resize(sum.size());
  double total = 0.0;
  for (std::size_t c = 0; c < sum.size(); ++c) {
    p.community[c] = size[c] ? sum[c] / static_cast<double>(size[c]) : 0.0;
    total += static_cast<double>(size[c]) * p.community[c];
  }
  p.total = n ? total / static_cast<double>(n) : 0.0;
  return p;
}

std::string to_string(SpreadingKind kind) {
  return kind == SpreadingKind::two_community ? "two_community" : "distributed";
}

SpreadingKind parse_spreading_kind(const std::string& text) {
  if (text == "two_community") return SpreadingKind::two_community;
  if (text == "distributed") return SpreadingKind::distributed;
  throw std::invalid_argument("unknown spreading kind '" + text + "'");
}

void SpreadingConfig::validate() const {
  if (!(eps_eq > 0.0)) throw std::invalid_argument("spreading: eps_eq must be positive");
  if (!(r_sig >= 0.0 && r_sig <= 1.0)) throw std::invalid_argument("spreading: r_sig must lie in [0, 1]");
  if (!(w_min_in <= w_max_in)) throw std::invalid_argument("spreading: w_min_in exceeds w_max_in");
  if (max_steps == 0) throw std::invalid_argument("spreading: max_steps must be positive");
  activation.validate();
  cycles.validate();
}

SpreadingOutcome run_spreading(const WeightedNetwork& network, const SpreadingConfig& cfg) {
  cfg.validate();
  const std::size_t n = network.n_nodes();
  std::vector<std::uint32_t> targets;
  if (cfg.kind == SpreadingKind::two_community) {
    if (cfg.seed_community >= network.n_communities()) {
      throw std::invalid_argument("spreading: seed community does not exist");
    }
    targets = network.members(cfg.seed_community);
  } else {
    targets.resize(n);
    std::iota(targets.begin(), targets.end(), 0u);
  }
  const bool silent = std::llround(cfg.r_sig * static_cast<double>(targets.size())) == 0;
  InputWeights input = silent ? InputWeights::zeros(n, 1)
                              : build_input_weights(1, n, targets, cfg.r_sig, cfg.w_min_in, cfg.w_max_in,
                                                    cfg.input_gain, substream(cfg.rng_seed, 1));
  const Reservoir reservoir(network, std::move(input), cfg.activation);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));

  auto profile_of = [&](double u) {
    const std::array<double, 1> in{u};
    const auto eq = run_to_equilibrium(reservoir, in, zero, cfg.eps_eq, cfg.max_steps, cfg.cycles);
    ActivationProfile p = activation_profile(network, eq.mean_state);
    p.t_e = eq.t_e;
    p.converged = eq.converged;
    return p;
  };

  SpreadingOutcome out;
  out.baseline = profile_of(0.0);
  out.profile = profile_of(cfg.input_value);
  if (cfg.subtract_baseline) {
    for (std::size_t c = 0; c < out.profile.community.size(); ++c) {
      out.profile.community[c] -= out.baseline.community[c];
    }
    out.profile.total -= out.baseline.total;
  }
  return out;
}

std::vector<PhaseCell> spreading_phase_diagram(std::span<const double> mus,
                                               std::span<const double> r_sigs,
                                               const SpreadingExperiment& exp) {
  if (mus.empty() || r_sigs.empty()) throw std::invalid_argument("phase diagram: empty grid");
  if (exp.realizations == 0) throw std::invalid_argument("phase diagram: need at least one realization");
  if (exp.n_communities == 0 || exp.n_nodes % exp.n_communities != 0) {
    throw std::invalid_argument("phase diagram: nodes must split into equal communities");
  }
  exp.weights.validate();
  exp.spreading.validate();

  const std::size_t n_cells = mus.size() * r_sigs.size();
  std::vector<SpreadingOutcome> results(n_cells * exp.realizations);
  parallel_for(results.size(), exp.workers, [&](std::size_t job) {
    const std::size_t cell = job / exp.realizations;
    const std::size_t real = job % exp.realizations;
    const JobSeeds seeds = JobSeeds::from(derive_seed(exp.master_seed, cell, real));
    const auto spec = ModularGraphSpec::equal_communities(exp.n_nodes, exp.n_communities, exp.node_degree,
                                                          mus[cell / r_sigs.size()], seeds.graph);
    const auto network = assign_weights(generate_modular_graph(spec), exp.weights, seeds.weights);
    SpreadingConfig cfg = exp.spreading;
    cfg.r_sig = r_sigs[cell % r_sigs.size()];
    cfg.rng_seed = seeds.task;
    results[job] = run_spreading(network, cfg);
  });

  std::vector<PhaseCell> cells(n_cells);
  for (std::size_t cell = 0; cell < n_cells; ++cell) {
    PhaseCell& pc = cells[cell];
    pc.mu = mus[cell / r_sigs.size()];
    pc.r_sig = r_sigs[cell % r_sigs.size()];
    pc.n_samples = exp.realizations;
    const std::size_t nc = exp.n_communities;
    std::vector<double> sum(nc, 0.0), sum_sq(nc, 0.0);
    pc.baseline_community_mean.assign(nc, 0.0);
    double total = 0.0, total_sq = 0.0, t_e = 0.0;
    for (std::size_t r = 0; r < exp.realizations; ++r) {
      const SpreadingOutcome& o = results[cell * exp.realizations + r];
      for (std::size_t c = 0; c < nc; ++c) {
        sum[c] += o.profile.community[c];
        sum_sq[c] += o.profile.community[c] * o.profile.community[c];
        pc.baseline_community_mean[c] += o.baseline.community[c];
      }
      total += o.profile.total;
      total_sq += o.profile.total * o.profile.total;
      pc.baseline_total_mean += o.baseline.total;
      t_e += static_cast<double>(o.profile.t_e);
    }
    const double count = static_cast<double>(exp.realizations);
    pc.community_mean.resize(nc);
    pc.community_std.resize(nc);
    for (std::size_t c = 0; c < nc; ++c) {
      pc.community_mean[c] = sum[c] / count;
      pc.community_std[c] = sample_std(sum[c], sum_sq[c], exp.realizations);
      pc.baseline_community_mean[c] /= count;
    }
    pc.total_mean = total / count;
    pc.total_std = sample_std(total, total_sq, exp.realizations);
    pc.baseline_total_mean /= count;
    pc.t_e_mean = t_e / count;
  }
  return cells;
}

std::vector<PhaseCell> two_community_experiment(std::span<const double> mus,
                                                std::span<const double> r_sigs,
                                                SpreadingExperiment exp) {
  exp.n_communities = 2;
  exp.spreading.kind = SpreadingKind::two_community;
  exp.spreading.seed_community = 0;
  return spreading_phase_diagram(mus, r_sigs, exp);
}

std::vector<PhaseCell> distributed_input_experiment(std::span<const double> mus,
                                                    std::span<const double> r_sigs,
                                                    SpreadingExperiment exp) {
  exp.spreading.kind = SpreadingKind::distributed;
  return spreading_phase_diagram(mus, r_sigs, exp);
}

void write_phase_diagram(std::ostream& out, std::span<const PhaseCell> cells) {
  out << "mu,r_sig,community_id,activation_mean,activation_std,t_e_mean,n_samples\n";
  auto row = [&](const PhaseCell& pc, const std::string& id, double mean, double sd) {
    out << format_real(pc.mu) << ',' << format_real(pc.r_sig) << ',' << id << ',' << format_real(mean)
        << ',' << format_real(sd) << ',' << format_real(pc.t_e_mean) << ',' << pc.n_samples << '\n';
  };
  for (const auto& pc : cells) {
    for (std::size_t c = 0; c < pc.community_mean.size(); ++c) {
      row(pc, std::to_string(c), pc.community_mean[c], pc.community_std[c]);
    }
    row(pc, "total", pc.total_mean, pc.total_std);
  }
}

std::size_t AttractorSummary::n_fixed_points() const {
  return static_cast<std::size_t>(std::count_if(attractors.begin(), attractors.end(), [](const Attractor& a) {
    return a.kind == AttractorKind::fixed_point;
  }));
}

std::size_t AttractorSummary::n_limit_cycles() const { return n_unique() - n_fixed_points(); }

AttractorSummary enumerate_attractors(const Reservoir& reservoir,
                                      std::span<const Eigen::VectorXd> initial_conditions,
                                      const CycleDetection& cfg, std::size_t workers) {
  cfg.validate();
  const std::vector<double> silence(reservoir.k_inputs(), 0.0);
  std::vector<std::optional<DetectedCycle>> found(initial_conditions.size());
  parallel_for(found.size(), workers, [&](std::size_t i) {
    found[i] = find_cycle(reservoir, silence, initial_conditions[i], cfg);
  });

  AttractorSummary summary;
  summary.assignment.assign(found.size(), -1);
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < found.size(); ++i) {
    if (!found[i]) {
      ++summary.n_unresolved;
      continue;
    }
    auto key = cycle_key(found[i]->cycle);
    auto [it, fresh] = index.emplace(std::move(key), summary.attractors.size());
    if (fresh) {
      Attractor a;
      a.period = found[i]->cycle.size();
      a.kind = a.period == 1 ? AttractorKind::fixed_point : AttractorKind::limit_cycle;
      a.representative = std::move(found[i]->representative);
      a.cycle = std::move(found[i]->cycle);
      summary.attractors.push_back(std::move(a));
    }
    ++summary.attractors[it->second].basin_size;
    summary.assignment[i] = static_cast<std::ptrdiff_t>(it->second);
  }
  return summary;
}

bool replay_cycle(const Reservoir& reservoir, const Attractor& attractor, double quantum) {
  const std::size_t n = reservoir.n_nodes();
  if (attractor.cycle.empty() || static_cast<std::size_t>(attractor.representative.size()) != n) return false;
  const std::vector<double> silence(reservoir.k_inputs(), 0.0);
  std::vector<double> x(attractor.representative.data(), attractor.representative.data() + n);
  std::vector<double> next(n);
  auto within = [&](const Quantized& q) {
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(x[i] - static_cast<double>(q[i]) * quantum) > quantum) return false;
    }
    return true;
  };
  for (const auto& q : attractor.cycle) {
    if (!within(q)) return false;
    reservoir.advance(x, silence, next);
    x.swap(next);
  }
  return within(attractor.cycle.front());
}

std::vector<Eigen::VectorXd> sequence_initial_conditions(const Reservoir& reservoir,
                                                         std::span<const RecallSequence> sequences,
                                                         std::size_t seq_dims) {
  const std::size_t n = reservoir.n_nodes();
  const std::size_t k = reservoir.k_inputs();
  if (k < seq_dims) throw std::invalid_argument("initial conditions: reservoir has too few inputs");
  std::vector<Eigen::VectorXd> out;
  out.reserve(sequences.size());
  std::vector<double> x(n), next(n), u(k);
  for (const auto& seq : sequences) {
    std::fill(x.begin(), x.end(), 0.0);
    for (const auto symbol : seq) {
      if (symbol >= seq_dims) throw std::invalid_argument("initial conditions: symbol out of range");
      std::fill(u.begin(), u.end(), 0.0);
      u[symbol] = 1.0;
      reservoir.advance(x, u, next);
      x.swap(next);
    }
    out.push_back(to_vector(x));
  }
  return out;
}

AttractorSummary run_attractor_probe(const WeightedNetwork& network,
                                     const AttractorExperimentConfig& cfg, std::size_t workers) {
  cfg.recall.validate();
  const Reservoir reservoir(network, recall_input_weights(network.n_nodes(), cfg.recall), cfg.recall.activation);
  const auto sequences = recall_sequences(cfg.recall);
  const auto initial = sequence_initial_conditions(reservoir, sequences, cfg.recall.seq_dims);
  return enumerate_attractors(reservoir, initial, cfg.cycles, workers);
}

}  // namespace modesn
