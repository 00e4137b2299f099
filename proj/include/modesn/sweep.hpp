// Parameter sweeps: one job per (cell, realization), written in canonical order.
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "modesn/config.hpp"
#include "modesn/topology.hpp"

namespace modesn {

struct SweepRow {
  Experiment experiment = Experiment::mc;
  double mu = 0.0;
  double r_sig = 0.0;
  double w_s = 0.0;
  std::size_t realization = 0;
  std::uint64_t seed = 0;
  std::string metric;
  double value = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  /// Messages of failed jobs, in canonical job order.
  std::vector<std::string> errors;

  bool ok() const { return errors.empty(); }
};

struct GridCell {
  double mu = 0.0;
  double r_sig = 0.0;
  double w_s = 0.0;
};

/// Cells ordered mu-major, then r_sig, then w_s.
std::vector<GridCell> sweep_cells(const SweepConfig& cfg);

/// The network of one job: topology, weights and optional spectral rescaling.
WeightedNetwork build_job_network(const SweepConfig& cfg, const GridCell& cell, std::uint64_t job_seed);

/// Metrics of one job, in a fixed order per experiment.
std::vector<std::pair<std::string, double>> run_job(const SweepConfig& cfg, const GridCell& cell,
                                                    std::uint64_t job_seed, std::size_t inner_workers = 1);

/// Job (cell c, realization r) uses derive_seed(master_seed, c, r). A failing
/// job yields a single "error" row with a NaN value.
SweepResult run_sweep(const SweepConfig& cfg, std::size_t workers = 1);

void write_sweep_csv(std::ostream& out, const SweepResult& result);

}  // namespace modesn
