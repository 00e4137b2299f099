// Command-line front end: single runs, sweeps, network generation.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "modesn/config.hpp"
#include "modesn/kernels.hpp"
#include "modesn/network_io.hpp"
#include "modesn/rng.hpp"
#include "modesn/sweep.hpp"

namespace {

using modesn::Experiment;
using modesn::SweepConfig;

std::string dashed(std::string key) {
  for (auto& ch : key) {
    if (ch == '_') ch = '-';
  }
  return key;
}

// Extra short spellings for the most common network flags.
const std::map<std::string, std::string> kAliases = {
    {"n_nodes", "--n"}, {"node_degree", "--degree"}, {"n_communities", "--communities"}, {"w_s", "--ws"}};

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string out;
  std::size_t workers = 1;
};

// Config file, --set pairs and one flag per config key, applied in that order.
struct Overrides {
  std::string config_path;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flags;

  void attach(CLI::App* cmd, bool with_config) {
    if (with_config) cmd->add_option("--config,-c", config_path, "Config file")->check(CLI::ExistingFile);
    cmd->add_option("--set", sets, "KEY=VALUE override (repeatable)");
    for (const auto& key : SweepConfig::keys()) {
      if (key == "experiment") continue;
      std::string names = "--" + dashed(key);
      if (const auto it = kAliases.find(key); it != kAliases.end()) names += "," + it->second;
      cmd->add_option(names, flags[key], "Config key " + key);
    }
  }

  SweepConfig resolve(SweepConfig cfg, const Globals& g) const {
    if (!config_path.empty()) {
      const Experiment forced = cfg.experiment;
      cfg = modesn::load_config(config_path);
      cfg.experiment = forced;
    }
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw modesn::ConfigError("--set expects KEY=VALUE, got '" + kv + "'");
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    for (const auto& key : SweepConfig::keys()) {
      const auto it = flags.find(key);
      if (it != flags.end() && !it->second.empty()) cfg.set(key, it->second);
    }
    if (g.seed) cfg.master_seed = *g.seed;
    return cfg;
  }
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) throw std::runtime_error(path + ": cannot open for writing");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

int write_sweep(const SweepConfig& cfg, const Globals& g, std::optional<std::uint64_t> job_seed) {
  cfg.validate();
  modesn::SweepResult result;
  if (job_seed) {
    // Re-run one job in isolation; the grid must name a single cell.
    const auto cells = modesn::sweep_cells(cfg);
    if (cells.size() != 1) throw modesn::ConfigError("--job-seed needs a single-cell grid");
    for (const auto& [name, value] : modesn::run_job(cfg, cells.front(), *job_seed, g.workers)) {
      result.rows.push_back({cfg.experiment, cells[0].mu, cells[0].r_sig, cells[0].w_s, 0, *job_seed, name, value});
    }
  } else {
    result = modesn::run_sweep(cfg, g.workers);
  }
  Output out(g.out.empty() ? cfg.output : g.out);
  modesn::write_sweep_csv(out.stream(), result);
  for (const auto& e : result.errors) std::cerr << "job failed: " << e << '\n';
  return result.ok() ? 0 : 1;
}

SweepConfig single_run_defaults(Experiment e) {
  SweepConfig cfg = modesn::preset(e);
  cfg.mu = {0.2};
  cfg.realizations = 1;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Echo state networks on modular graphs"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--out,-o", g.out, "Output path (default: stdout)");
  app.add_option("--workers,-j", g.workers, "Worker threads")->check(CLI::PositiveNumber);
  app.set_version_flag("--version", std::string("modesn ") + MODESN_VERSION + " (kernels: " +
                                        std::string(modesn::kernels::name(modesn::kernels::active())) + ")");
  app.fallthrough();

  struct RunCommand {
    CLI::App* cmd;
    Experiment experiment;
    Overrides overrides;
    std::optional<std::uint64_t> job_seed;
  };
  std::vector<RunCommand> runs;
  runs.reserve(6);
  auto add_run = [&](const char* name, const char* help, Experiment e) {
    runs.push_back({app.add_subcommand(name, help), e, {}, std::nullopt});
    runs.back().overrides.attach(runs.back().cmd, true);
    runs.back().cmd->add_option("--job-seed", runs.back().job_seed, "Run one job with this seed");
    return runs.back().cmd;
  };
  add_run("mc", "Memory capacity task", Experiment::mc);
  add_run("recall", "Sequence recall task", Experiment::recall);
  auto* spread = add_run("spread", "Spreading to equilibrium", Experiment::spread_two);
  std::string spread_kind = "two";
  spread->add_option("--kind", spread_kind, "two (two communities) or many (distributed input)")
      ->check(CLI::IsMember({"two", "many"}));
  add_run("attractors", "Attractor enumeration after sequence drives", Experiment::attractors);
  add_run("spectrum", "Eigenvalue magnitudes of W", Experiment::spectrum);

  auto* sweep = app.add_subcommand("sweep", "Config-driven parameter sweep");
  std::string sweep_config;
  sweep->add_option("--config,-c", sweep_config, "Config file")->required()->check(CLI::ExistingFile);
  Overrides sweep_overrides;
  sweep_overrides.attach(sweep, false);

  auto* validate = app.add_subcommand("validate-config", "Check a config file and print its canonical form");
  std::string validate_path;
  validate->add_option("config", validate_path, "Config file")->required();

  auto* generate = app.add_subcommand("generate", "Write a weighted modular network");
  Overrides gen_overrides;
  gen_overrides.attach(generate, true);
  std::optional<std::uint64_t> gen_job_seed;
  generate->add_option("--job-seed", gen_job_seed, "Job seed (default: derived from --seed)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    for (auto& run : runs) {
      if (!run.cmd->parsed()) continue;
      SweepConfig base = single_run_defaults(run.experiment == Experiment::spread_two && spread_kind == "many"
                                                 ? Experiment::spread_many
                                                 : run.experiment);
      return write_sweep(run.overrides.resolve(base, g), g, run.job_seed);
    }
    if (sweep->parsed()) {
      SweepConfig cfg = modesn::load_config(sweep_config);
      sweep_overrides.config_path.clear();
      const Experiment e = cfg.experiment;
      cfg = sweep_overrides.resolve(cfg, g);
      cfg.experiment = e;
      return write_sweep(cfg, g, std::nullopt);
    }
    if (validate->parsed()) {
      const SweepConfig cfg = modesn::load_config(validate_path);
      cfg.validate();
      std::cout << modesn::serialize_config(cfg);
      return 0;
    }
    if (generate->parsed()) {
      SweepConfig cfg = gen_overrides.resolve(single_run_defaults(Experiment::spectrum), g);
      cfg.validate();
      const auto cells = modesn::sweep_cells(cfg);
      if (cells.size() != 1) throw modesn::ConfigError("generate needs a single (mu, w_s) value");
      const std::uint64_t seed = gen_job_seed ? *gen_job_seed : modesn::derive_seed(cfg.master_seed, 0, 0);
      Output out(g.out);
      modesn::write_network(out.stream(), modesn::build_job_network(cfg, cells.front(), seed));
      return 0;
    }
  } catch (const modesn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
