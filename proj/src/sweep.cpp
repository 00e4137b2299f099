#include "modesn/sweep.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "modesn/dynamics.hpp"
#include "modesn/network_io.hpp"
#include "modesn/parallel.hpp"
#include "modesn/rng.hpp"
#include "modesn/tasks.hpp"

namespace modesn {

std::vector<GridCell> sweep_cells(const SweepConfig& cfg) {
  std::vector<GridCell> cells;
  cells.reserve(cfg.mu.size() * cfg.r_sig.size() * cfg.w_s.size());
  for (double mu : cfg.mu) {
    for (double rs : cfg.r_sig) {
      for (double ws : cfg.w_s) cells.push_back({mu, rs, ws});
    }
  }
  return cells;
}

WeightedNetwork build_job_network(const SweepConfig& cfg, const GridCell& cell, std::uint64_t job_seed) {
  const JobSeeds seeds = JobSeeds::from(job_seed);
  const auto spec =
      ModularGraphSpec::equal_communities(cfg.n_nodes, cfg.n_communities, cfg.node_degree, cell.mu, seeds.graph);
  auto network = assign_weights(generate_modular_graph(spec), cfg.weight_params(cell.w_s), seeds.weights);
  if (cfg.rho_target) network = rescale_to_spectral_radius(network, *cfg.rho_target);
  return network;
}

std::vector<std::pair<std::string, double>> run_job(const SweepConfig& cfg, const GridCell& cell,
                                                    std::uint64_t job_seed, std::size_t inner_workers) {
  const JobSeeds seeds = JobSeeds::from(job_seed);
  const auto network = build_job_network(cfg, cell, job_seed);
  std::vector<std::pair<std::string, double>> m;
  m.emplace_back("measured_mu", measured_mu(network));
  switch (cfg.experiment) {
    case Experiment::mc: {
      const auto r = run_mc_task(network, cfg.mc_task(cell.r_sig, seeds.task));
      m.emplace_back("mc", r.mc);
      m.emplace_back("mc_train", r.mc_train);
      m.emplace_back("mean_activation", r.mean_activation);
      for (std::size_t k = 0; k < r.mc_k.size(); ++k) m.emplace_back("mc_k_" + std::to_string(k + 1), r.mc_k[k]);
      break;
    }
    case Experiment::recall: {
      const auto r = run_recall_task(network, cfg.recall_task(cell.r_sig, seeds.task));
      m.emplace_back("fraction_perfect", r.fraction_perfect);
      break;
    }
    case Experiment::spread_two:
    case Experiment::spread_many: {
      const auto r = run_spreading(network, cfg.spreading(cell.r_sig, seeds.task));
      m.emplace_back("activation_total", r.profile.total);
      m.emplace_back("baseline_total", r.baseline.total);
      m.emplace_back("t_e", static_cast<double>(r.profile.t_e));
      m.emplace_back("converged", r.profile.converged ? 1.0 : 0.0);
      for (std::size_t c = 0; c < r.profile.community.size(); ++c) {
        m.emplace_back("activation_c" + std::to_string(c), r.profile.community[c]);
      }
      break;
    }
    case Experiment::attractors: {
      AttractorExperimentConfig a{cfg.recall_task(cell.r_sig, seeds.task), cfg.cycles()};
      const auto s = run_attractor_probe(network, a, inner_workers);
      const Reservoir reservoir(network, recall_input_weights(network.n_nodes(), a.recall), a.recall.activation);
      bool sound = true;
      for (const auto& att : s.attractors) sound = sound && replay_cycle(reservoir, att, cfg.quantum);
      std::size_t longest = 0;
      for (const auto& att : s.attractors) longest = std::max(longest, att.period);
      m.emplace_back("n_unique", static_cast<double>(s.n_unique()));
      m.emplace_back("n_fixed_points", static_cast<double>(s.n_fixed_points()));
      m.emplace_back("n_limit_cycles", static_cast<double>(s.n_limit_cycles()));
      m.emplace_back("n_unresolved", static_cast<double>(s.n_unresolved));
      m.emplace_back("max_period", static_cast<double>(longest));
      m.emplace_back("replay_ok", sound ? 1.0 : 0.0);
      break;
    }
    case Experiment::spectrum: {
      const auto r = spectrum(network);
      m.emplace_back("lambda1", r.lambda1_abs);
      m.emplace_back("lambda2", r.lambda2_abs);
      m.emplace_back("spectral_gap", r.spectral_gap);
      break;
    }
  }
  return m;
}

SweepResult run_sweep(const SweepConfig& cfg, std::size_t workers) {
  cfg.validate();
  const auto cells = sweep_cells(cfg);
  const std::size_t n_jobs = cells.size() * cfg.realizations;
  struct Outcome {
    std::vector<std::pair<std::string, double>> metrics;
    std::string error;
  };
  std::vector<Outcome> outcomes(n_jobs);
  parallel_for(n_jobs, workers, [&](std::size_t job) {
    const std::size_t cell = job / cfg.realizations;
    const std::size_t real = job % cfg.realizations;
    try {
      outcomes[job].metrics = run_job(cfg, cells[cell], derive_seed(cfg.master_seed, cell, real));
    } catch (const std::exception& e) {
      outcomes[job].error = e.what();
    }
  });

  SweepResult result;
  for (std::size_t job = 0; job < n_jobs; ++job) {
    const std::size_t cell = job / cfg.realizations;
    const std::size_t real = job % cfg.realizations;
    SweepRow base{cfg.experiment, cells[cell].mu, cells[cell].r_sig, cells[cell].w_s, real,
                  derive_seed(cfg.master_seed, cell, real), {}, 0.0};
    if (!outcomes[job].error.empty()) {
      base.metric = "error";
      base.value = std::numeric_limits<double>::quiet_NaN();
      result.rows.push_back(base);
      result.errors.push_back("cell " + std::to_string(cell) + " realization " + std::to_string(real) + ": " +
                              outcomes[job].error);
      continue;
    }
    for (auto& [name, value] : outcomes[job].metrics) {
      SweepRow row = base;
      row.metric = name;
      row.value = value;
      result.rows.push_back(std::move(row));
    }
  }
  return result;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << "experiment,mu,r_sig,w_s,realization,seed,metric,value\n";
  for (const auto& r : result.rows) {
    out << to_string(r.experiment) << ',' << format_real(r.mu) << ',' << format_real(r.r_sig) << ','
        << format_real(r.w_s) << ',' << r.realization << ',' << r.seed << ',' << r.metric << ','
        << (std::isnan(r.value) ? std::string("nan") : format_real(r.value)) << '\n';
  }
}

}  // namespace modesn
