// Acceptance checks at desk scale. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails. Sweep CSVs land in --artifacts (default: cwd).
//
//   acceptance [--artifacts DIR] [--workers N] [--only NAME] [--full-scale]
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "modesn/config.hpp"
#include "modesn/dynamics.hpp"
#include "modesn/readout.hpp"
#include "modesn/reservoir.hpp"
#include "modesn/rng.hpp"
#include "modesn/sweep.hpp"
#include "modesn/topology.hpp"

using namespace modesn;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::filesystem::path g_artifacts = ".";
std::size_t g_workers = 1;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<double> mu_grid(double step = 0.05) {
  std::vector<double> mus;
  for (int i = 0; i * step <= 0.5 + 1e-9; ++i) mus.push_back(std::round(i * step * 1e12) / 1e12);
  return mus;
}

// Mean of `metric` per mu over all rows of a sweep.
std::map<double, double> mean_by_mu(const SweepResult& r, const std::string& metric) {
  std::map<double, std::pair<double, int>> acc;
  for (const auto& row : r.rows) {
    if (row.metric != metric) continue;
    acc[row.mu].first += row.value;
    ++acc[row.mu].second;
  }
  std::map<double, double> out;
  for (const auto& [mu, s] : acc) out[mu] = s.first / s.second;
  return out;
}

std::string curve(const std::map<double, double>& m) {
  std::string s;
  for (const auto& [mu, v] : m) s += fmt(" %.2f:%.3f", mu, v);
  return s;
}

void save(const SweepResult& r, const std::string& name) {
  std::ofstream out(g_artifacts / name);
  write_sweep_csv(out, r);
}

SweepResult sweep_or_fail(const SweepConfig& cfg) {
  auto r = run_sweep(cfg, g_workers);
  if (!r.ok()) throw std::runtime_error("sweep job failed: " + r.errors.front());
  return r;
}

Outcome generator_fidelity() {
  double worst_time = 0.0;
  double worst_err = 0.0;
  bool degrees_ok = true;
  std::string means;
  for (double mu : {0.0, 0.1, 0.2, 0.3, 0.4, 0.5}) {
    double sum = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto t0 = Clock::now();
      const auto g = generate_modular_graph(ModularGraphSpec::equal_communities(500, 50, 6, mu, derive_seed(42, 0, s)));
      worst_time = std::max(worst_time, seconds_since(t0));
      for (auto d : g.degrees()) degrees_ok = degrees_ok && d == 6;
      sum += measured_mu(g);
    }
    worst_err = std::max(worst_err, std::abs(sum / 20.0 - mu));
    means += fmt(" %.3f", sum / 20.0);
  }
  return {degrees_ok && worst_err <= 0.01 && worst_time < 1.0,
          fmt("exact degree=%s, max |mean mu - mu|=%.4f, slowest graph %.3fs; means:", degrees_ok ? "yes" : "no",
              worst_err, worst_time) +
              means};
}

Outcome activation_checks() {
  const ActivationParams p;
  const double f0 = activation(0.0, p);
  const double mid = activation(p.c / p.k_steepness, p);
  Rng rng(2024);
  int violations = 0;
  for (int i = 0; i < 10000; ++i) {
    double a = rng.uniform(-10.0, 10.0), b = rng.uniform(-10.0, 10.0);
    if (a > b) std::swap(a, b);
    if (activation(a, p) > activation(b, p)) ++violations;
  }
  const bool ok = std::abs(f0 - 0.268941) <= 1e-6 && std::abs(mid - 0.5) <= 1e-12 && violations == 0;
  return {ok, fmt("f(0)=%.9f, f(c/k)-0.5=%.1e, monotonicity violations=%d/10000", f0, mid - 0.5, violations)};
}

Outcome trainer_oracle() {
  Rng rng(7);
  auto random = [&](Eigen::Index r, Eigen::Index c) {
    Eigen::MatrixXd m(r, c);
    for (auto& v : m.reshaped()) v = rng.uniform(-1.0, 1.0);
    return m;
  };
  const Eigen::MatrixXd X = random(60, 500);
  const Eigen::MatrixXd M = random(4, 60);
  const double recovery = (train_readout({X, M * X}).W_out - M).cwiseAbs().maxCoeff();

  const Eigen::MatrixXd Y = M * X + 0.05 * random(4, 500);
  const Eigen::MatrixXd W = train_readout({X, Y}).W_out;
  const double base = (Y - W * X).squaredNorm();
  int worse = 0;
  double min_gain = INFINITY;
  for (int i = 0; i < 1000; ++i) {
    Eigen::MatrixXd d = random(W.rows(), W.cols());
    d *= 1e-3 / d.norm();
    const double gain = (Y - (W + d) * X).squaredNorm() - base;
    min_gain = std::min(min_gain, gain);
    if (gain < 0.0) ++worse;
  }
  return {recovery < 1e-8 && worse == 0,
          fmt("recovery max error=%.2e, perturbations that lowered the residual=%d/1000 (min increase %.2e)",
              recovery, worse, min_gain)};
}

Outcome spectral_control() {
  double worst = 0.0;
  int n = 0;
  for (double mu : {0.0, 0.1, 0.2, 0.3, 0.4, 0.5}) {
    for (std::uint64_t s = 0; s < (mu == 0.0 || mu == 0.5 ? 4u : 3u); ++s, ++n) {
      const auto seed = derive_seed(99, static_cast<std::uint64_t>(mu * 100), s);
      const auto g = generate_modular_graph(ModularGraphSpec::equal_communities(500, 50, 6, mu, seed));
      const auto net = assign_weights(g, {-0.2, 1.0, 1.13, false}, substream(seed, 1));
      const double target = 0.5 + 0.1 * static_cast<double>(n % 10);
      const double got = spectrum(rescale_to_spectral_radius(net, target)).lambda1_abs;
      worst = std::max(worst, std::abs(got - target) / target);
    }
  }
  return {n == 20 && worst <= 1e-6, fmt("%d networks, worst relative error %.2e", n, worst)};
}

Outcome spreading() {
  SweepConfig preset_cfg = preset(Experiment::spread_two);
  SpreadingExperiment exp;
  exp.n_nodes = 500;
  exp.node_degree = preset_cfg.node_degree;
  exp.weights = preset_cfg.weight_params(preset_cfg.w_s.front());
  exp.spreading = preset_cfg.spreading(0.3, 0);
  exp.realizations = 48;
  exp.master_seed = 2;
  exp.workers = g_workers;
  const auto mus = mu_grid();
  std::vector<double> r_sigs;
  for (int i = 1; i <= 10; ++i) r_sigs.push_back(std::round(i * 0.05 * 1e12) / 1e12);

  const auto t0 = Clock::now();
  const auto two = two_community_experiment(mus, r_sigs, exp);
  exp.n_communities = 50;
  const auto many = distributed_input_experiment(mus, r_sigs, exp);
  const double elapsed = seconds_since(t0);
  {
    std::ofstream a(g_artifacts / "spread_two.csv");
    write_phase_diagram(a, two);
    std::ofstream b(g_artifacts / "spread_many.csv");
    write_phase_diagram(b, many);
  }

  auto at = [&](const std::vector<PhaseCell>& cells, double mu, double rs) -> const PhaseCell& {
    for (const auto& c : cells) {
      if (std::abs(c.mu - mu) < 1e-9 && std::abs(c.r_sig - rs) < 1e-9) return c;
    }
    throw std::logic_error("missing cell");
  };
  const PhaseCell& c0 = at(two, 0.0, 0.3);
  const double seed_rise = c0.community_mean[0] - c0.baseline_community_mean[0];
  const double neighbour_gap = std::abs(c0.community_mean[1] - c0.baseline_community_mean[1]);
  const bool a_ok = neighbour_gap <= 0.05 && seed_rise >= 0.3;

  std::map<double, double> total, total_many;
  for (double mu : mus) {
    total[mu] = at(two, mu, 0.3).total_mean;
    total_many[mu] = at(many, mu, 0.3).total_mean;
  }
  double interior = 0.0;
  for (const auto& [mu, v] : total) {
    if (mu > 0.05 + 1e-9 && mu < 0.45 - 1e-9) interior = std::max(interior, v);
  }
  const bool b_ok = interior >= 1.1 * total[0.0] && interior >= 1.1 * total[0.5];

  return {a_ok && b_ok,
          fmt("(a) mu=0: seed-baseline=%.3f, |neighbour-baseline|=%.4f [%s]; (b) interior max %.3f vs ends %.3f/%.3f [%s];"
              " %.0fs for both diagrams (%zu workers)",
              seed_rise, neighbour_gap, a_ok ? "ok" : "no", interior, total[0.0], total[0.5], b_ok ? "ok" : "no",
              elapsed, g_workers) +
              "\n      two-community total:" + curve(total) + "\n      distributed total:  " + curve(total_many)};
}

Outcome memory_capacity() {
  SweepConfig cfg = preset(Experiment::mc);
  cfg.mu = mu_grid();
  cfg.r_sig = {0.3};
  cfg.realizations = 32;
  cfg.master_seed = 3;
  const auto t0 = Clock::now();
  const auto r = sweep_or_fail(cfg);
  const double elapsed = seconds_since(t0);
  save(r, "mc.csv");
  const auto mc = mean_by_mu(r, "mc");
  auto best = mc.begin();
  for (auto it = mc.begin(); it != mc.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  const double ref = mc.at(0.5);
  const bool margin = best->second - ref >= 0.15 * ref && best->second - mc.at(0.05) >= 0.15 * ref;
  const bool located = best->first >= 0.10 - 1e-9 && best->first <= 0.35 + 1e-9;
  return {margin && located, fmt("argmax mu*=%.2f MC=%.3f, MC(0.05)=%.3f, MC(0.5)=%.3f, %.0fs; curve:", best->first,
                                 best->second, mc.at(0.05), ref, elapsed) +
                                 curve(mc)};
}

Outcome recall(bool full_scale) {
  SweepConfig cfg = preset(Experiment::recall);
  cfg.mu = mu_grid();
  cfg.master_seed = 4;
  if (full_scale) {
    cfg.n_nodes = 1000;
    cfg.n_communities = 100;
    cfg.n_sequences = 200;
    cfg.delta_t = 80;
    cfg.realizations = 48;
  }
  const auto t0 = Clock::now();
  const auto r = sweep_or_fail(cfg);
  const double elapsed = seconds_since(t0);
  save(r, full_scale ? "recall_full.csv" : "recall.csv");
  const auto f = mean_by_mu(r, "fraction_perfect");
  const double low = (f.at(0.05) + f.at(0.1) + f.at(0.15)) / 3.0;
  if (full_scale) {
    auto best = f.begin();
    for (auto it = f.begin(); it != f.end(); ++it) {
      if (it->second > best->second) best = it;
    }
    const bool spike = best->first >= 0.05 - 1e-9 && best->first <= 0.15 + 1e-9 && low - f.at(0.5) >= 0.1;
    return {spike, fmt("argmax mu=%.2f, mean over [0.05,0.15]=%.3f, mu=0.5: %.3f, %.0fs; curve:", best->first, low,
                       f.at(0.5), elapsed) +
                       curve(f)};
  }
  return {low - f.at(0.5) >= 0.1,
          fmt("mean over mu in [0.05,0.15]=%.3f, mu=0.5: %.3f, %.0fs; curve:", low, f.at(0.5), elapsed) + curve(f)};
}

Outcome attractors() {
  SweepConfig cfg = preset(Experiment::attractors);
  cfg.mu = {0.1, 0.4};
  cfg.master_seed = 5;
  const auto t0 = Clock::now();
  const auto r = sweep_or_fail(cfg);
  const double elapsed = seconds_since(t0);
  save(r, "attractors.csv");
  const auto unique = mean_by_mu(r, "n_unique");
  const auto replay = mean_by_mu(r, "replay_ok");
  const auto unresolved = mean_by_mu(r, "n_unresolved");
  const auto cycles = mean_by_mu(r, "n_limit_cycles");
  const bool sound = replay.at(0.1) == 1.0 && replay.at(0.4) == 1.0;
  return {unique.at(0.1) > unique.at(0.4) && sound,
          fmt("mean unique attractors mu=0.1: %.2f (limit cycles %.2f), mu=0.4: %.2f (limit cycles %.2f); "
              "all cycles replay=%s; mean unresolved %.2f/%.2f; %.0fs",
              unique.at(0.1), cycles.at(0.1), unique.at(0.4), cycles.at(0.4), sound ? "yes" : "no",
              unresolved.at(0.1), unresolved.at(0.4), elapsed)};
}

Outcome determinism() {
  std::vector<std::string> mismatched;
  int checked = 0;
  for (auto e : {Experiment::mc, Experiment::recall, Experiment::spread_two, Experiment::spread_many,
                 Experiment::attractors, Experiment::spectrum}) {
    SweepConfig cfg = preset(e);
    cfg.mu = {0.0, 0.25, 0.5};
    cfg.r_sig = {0.2, 0.3};
    cfg.realizations = 3;
    cfg.master_seed = 6;
    cfg.n_sequences = 30;
    cfg.train_len = 600;
    cfg.validation_len = 600;
    cfg.washout = 200;
    auto text = [&](std::size_t workers) {
      std::ostringstream out;
      write_sweep_csv(out, run_sweep(cfg, workers));
      return out.str();
    };
    const auto first = text(1);
    ++checked;
    if (first != text(1) || first != text(8)) mismatched.push_back(to_string(e));
  }
  std::string which;
  for (const auto& m : mismatched) which += " " + m;
  return {mismatched.empty(),
          fmt("%d experiments rerun at 1, 1 and 8 workers; mismatches:", checked) + (which.empty() ? " none" : which)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desk-scale acceptance checks"};
  std::string artifacts = ".";
  std::string only;
  bool full_scale = false;
  g_workers = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--artifacts", artifacts, "Directory for sweep CSVs");
  app.add_option("--workers", g_workers, "Worker threads for sweeps");
  app.add_option("--only", only, "Run a single criterion by name");
  app.add_flag("--full-scale", full_scale, "Run the full-size recall sweep instead of the desk suite");
  CLI11_PARSE(app, argc, argv);
  g_artifacts = artifacts;
  std::filesystem::create_directories(g_artifacts);

  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria;
  if (full_scale) {
    criteria = {{"recall_full_scale", [] { return recall(true); }}};
  } else {
    criteria = {{"generator_fidelity", generator_fidelity},
                {"activation_checks", activation_checks},
                {"trainer_oracle", trainer_oracle},
                {"spectral_control", spectral_control},
                {"spreading_phase_diagram", spreading},
                {"mc_optimal_modularity", memory_capacity},
                {"recall_optimal_modularity", [] { return recall(false); }},
                {"attractor_count", attractors},
                {"determinism", determinism}};
  }
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    if (!only.empty() && name != only) continue;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
