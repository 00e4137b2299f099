#include "modesn/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <sstream>

#include "modesn/network_io.hpp"

namespace modesn {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) items.push_back(trim(item));
  if (!value.empty() && value.back() == ',') items.emplace_back();
  return items;
}

double to_real(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ConfigError(key + ": expected a finite number, got '" + text + "'");
  }
  return v;
}

template <class Int>
Int to_integer(const std::string& key, const std::string& text) {
  Int v = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_real(values[i]);
  }
  return out;
}

struct Field {
  std::function<void(SweepConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const SweepConfig&)> get;
};

template <class T>
Field scalar(T SweepConfig::*member) {
  Field f;
  f.set = [member](SweepConfig& c, const std::string& key, const std::string& v) {
    if constexpr (std::is_same_v<T, double>) {
      c.*member = to_real(key, v);
    } else if constexpr (std::is_same_v<T, bool>) {
      c.*member = to_bool(key, v);
    } else if constexpr (std::is_same_v<T, std::string>) {
      c.*member = v;
    } else {
      c.*member = to_integer<T>(key, v);
    }
  };
  f.get = [member](const SweepConfig& c) -> std::string {
    if constexpr (std::is_same_v<T, double>) {
      return format_real(c.*member);
    } else if constexpr (std::is_same_v<T, bool>) {
      return c.*member ? "true" : "false";
    } else if constexpr (std::is_same_v<T, std::string>) {
      return c.*member;
    } else {
      return std::to_string(c.*member);
    }
  };
  return f;
}

Field list(std::vector<double> SweepConfig::*member) {
  Field f;
  f.set = [member](SweepConfig& c, const std::string& key, const std::string& v) {
    std::vector<double> values;
    for (const auto& item : split_list(v)) values.push_back(to_real(key, item));
    c.*member = std::move(values);
  };
  f.get = [member](const SweepConfig& c) { return join(c.*member); };
  return f;
}

using FieldTable = std::vector<std::pair<std::string, Field>>;

const FieldTable& fields() {
  static const FieldTable table = [] {
    FieldTable t;
    t.emplace_back("experiment", Field{
        [](SweepConfig& c, const std::string&, const std::string& v) { c.experiment = parse_experiment(v); },
        [](const SweepConfig& c) { return to_string(c.experiment); }});
    t.emplace_back("mu", list(&SweepConfig::mu));
    t.emplace_back("r_sig", list(&SweepConfig::r_sig));
    t.emplace_back("w_s", list(&SweepConfig::w_s));
    t.emplace_back("rho_target", Field{
        [](SweepConfig& c, const std::string& key, const std::string& v) {
          if (v == "none") {
            c.rho_target.reset();
          } else {
            c.rho_target = to_real(key, v);
          }
        },
        [](const SweepConfig& c) { return c.rho_target ? format_real(*c.rho_target) : std::string("none"); }});
    t.emplace_back("realizations", scalar(&SweepConfig::realizations));
    t.emplace_back("master_seed", scalar(&SweepConfig::master_seed));
    t.emplace_back("n_nodes", scalar(&SweepConfig::n_nodes));
    t.emplace_back("n_communities", scalar(&SweepConfig::n_communities));
    t.emplace_back("node_degree", scalar(&SweepConfig::node_degree));
    t.emplace_back("w_min", scalar(&SweepConfig::w_min));
    t.emplace_back("w_max", scalar(&SweepConfig::w_max));
    t.emplace_back("symmetric", scalar(&SweepConfig::symmetric));
    t.emplace_back("act_a", scalar(&SweepConfig::act_a));
    t.emplace_back("act_b", scalar(&SweepConfig::act_b));
    t.emplace_back("act_c", scalar(&SweepConfig::act_c));
    t.emplace_back("act_k", scalar(&SweepConfig::act_k));
    t.emplace_back("act_d", scalar(&SweepConfig::act_d));
    t.emplace_back("w_min_in", scalar(&SweepConfig::w_min_in));
    t.emplace_back("w_max_in", scalar(&SweepConfig::w_max_in));
    t.emplace_back("input_gain", scalar(&SweepConfig::input_gain));
    t.emplace_back("washout", scalar(&SweepConfig::washout));
    t.emplace_back("train_len", scalar(&SweepConfig::train_len));
    t.emplace_back("validation_len", scalar(&SweepConfig::validation_len));
    t.emplace_back("max_delay", scalar(&SweepConfig::max_delay));
    t.emplace_back("readout_rel_tol", scalar(&SweepConfig::readout_rel_tol));
    t.emplace_back("seq_dims", scalar(&SweepConfig::seq_dims));
    t.emplace_back("seq_len", scalar(&SweepConfig::seq_len));
    t.emplace_back("delta_t", scalar(&SweepConfig::delta_t));
    t.emplace_back("n_sequences", scalar(&SweepConfig::n_sequences));
    t.emplace_back("cue", scalar(&SweepConfig::cue));
    t.emplace_back("input_value", scalar(&SweepConfig::input_value));
    t.emplace_back("eps_eq", scalar(&SweepConfig::eps_eq));
    t.emplace_back("max_steps", scalar(&SweepConfig::max_steps));
    t.emplace_back("subtract_baseline", scalar(&SweepConfig::subtract_baseline));
    t.emplace_back("quantum", scalar(&SweepConfig::quantum));
    t.emplace_back("max_transient", scalar(&SweepConfig::max_transient));
    t.emplace_back("max_period", scalar(&SweepConfig::max_period));
    t.emplace_back("output", scalar(&SweepConfig::output));
    return t;
  }();
  return table;
}

const Field& field(const std::string& key) {
  for (const auto& [name, f] : fields()) {
    if (name == key) return f;
  }
  throw ConfigError("unknown key '" + key + "'");
}

std::vector<double> grid(double lo, double hi, double step) {
  std::vector<double> out;
  const auto n = static_cast<long>(std::llround((hi - lo) / step));
  for (long i = 0; i <= n; ++i) out.push_back(std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12);
  return out;
}

}  // namespace

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::mc: return "mc";
    case Experiment::recall: return "recall";
    case Experiment::spread_two: return "spread_two";
    case Experiment::spread_many: return "spread_many";
    case Experiment::attractors: return "attractors";
    case Experiment::spectrum: return "spectrum";
  }
  return "?";
}

Experiment parse_experiment(const std::string& text) {
  for (auto e : {Experiment::mc, Experiment::recall, Experiment::spread_two, Experiment::spread_many,
                 Experiment::attractors, Experiment::spectrum}) {
    if (to_string(e) == text) return e;
  }
  throw ConfigError("experiment: unknown experiment '" + text + "'");
}

const std::vector<std::string>& SweepConfig::keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, f] : fields()) out.push_back(name);
    return out;
  }();
  return names;
}

void SweepConfig::set(const std::string& key, const std::string& value) {
  field(key).set(*this, key, value);
}

void SweepConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (mu.empty()) fail("mu: grid is empty");
  if (r_sig.empty()) fail("r_sig: grid is empty");
  if (w_s.empty()) fail("w_s: grid is empty");
  for (double m : mu) {
    if (!(m >= 0.0 && m < 1.0)) fail("mu: " + format_real(m) + " is outside [0, 1)");
  }
  for (double r : r_sig) {
    if (!(r >= 0.0 && r <= 1.0)) fail("r_sig: " + format_real(r) + " is outside [0, 1]");
  }
  for (double w : w_s) {
    if (!(w >= 0.0)) fail("w_s: " + format_real(w) + " is negative");
  }
  if (rho_target && !(*rho_target > 0.0)) fail("rho_target: must be positive");
  if (realizations == 0) fail("realizations: must be at least 1");
  if (n_nodes == 0) fail("n_nodes: must be positive");
  if (n_communities == 0 || n_nodes % n_communities != 0) {
    fail("n_communities: must divide n_nodes");
  }
  if (experiment == Experiment::spread_two && n_communities != 2) {
    fail("n_communities: spread_two needs exactly 2 communities");
  }
  if (!(w_min < w_max)) fail("w_min: must be below w_max");
  if (!(w_min_in <= w_max_in)) fail("w_min_in: exceeds w_max_in");
  if (!(act_k > 0.0)) fail("act_k: must be positive");
  if (!(eps_eq > 0.0)) fail("eps_eq: must be positive");
  if (!(quantum > 0.0)) fail("quantum: must be positive");
  if (max_period == 0) fail("max_period: must be positive");
  if (max_steps == 0) fail("max_steps: must be positive");
  if (!(readout_rel_tol >= 0.0)) fail("readout_rel_tol: must be non-negative");
  if (experiment == Experiment::mc) {
    if (train_len <= max_delay) fail("train_len: must exceed max_delay");
    if (validation_len <= max_delay) fail("validation_len: must exceed max_delay");
    if (max_delay == 0) fail("max_delay: must be positive");
  }
  if (experiment == Experiment::recall || experiment == Experiment::attractors) {
    if (seq_dims == 0 || seq_len == 0) fail("seq_dims: sequences must be non-empty");
    double total = 1.0;
    for (std::size_t i = 0; i < seq_len; ++i) total *= static_cast<double>(seq_dims);
    if (static_cast<double>(n_sequences) > total) fail("n_sequences: exceeds the number of distinct sequences");
    if (n_sequences == 0) fail("n_sequences: must be positive");
  }
  // Catch spec-level problems (degree, parity) before any job runs.
  try {
    ModularGraphSpec::equal_communities(n_nodes, n_communities, node_degree, mu.front(), 0).validate();
  } catch (const std::invalid_argument& e) {
    fail(std::string("network: ") + e.what());
  }
}

ActivationParams SweepConfig::activation() const { return {act_a, act_b, act_c, act_k, act_d}; }

WeightParams SweepConfig::weight_params(double scale) const { return {w_min, w_max, scale, symmetric}; }

MCTaskConfig SweepConfig::mc_task(double rs, std::uint64_t seed) const {
  MCTaskConfig t;
  t.washout = washout;
  t.train_len = train_len;
  t.validation_len = validation_len;
  t.max_delay = max_delay;
  t.r_sig = rs;
  t.w_min_in = w_min_in;
  t.w_max_in = w_max_in;
  t.input_gain = input_gain;
  t.activation = activation();
  t.readout.rel_tol = readout_rel_tol;
  t.rng_seed = seed;
  return t;
}

RecallTaskConfig SweepConfig::recall_task(double rs, std::uint64_t seed) const {
  RecallTaskConfig t;
  t.seq_dims = seq_dims;
  t.seq_len = seq_len;
  t.delta_t = delta_t;
  t.n_sequences = n_sequences;
  t.cue_enabled = cue;
  t.r_sig = rs;
  t.input_gain = input_gain;
  t.w_min_in = w_min_in;
  t.w_max_in = w_max_in;
  t.activation = activation();
  t.readout.rel_tol = readout_rel_tol;
  t.rng_seed = seed;
  return t;
}

SpreadingConfig SweepConfig::spreading(double rs, std::uint64_t seed) const {
  SpreadingConfig s;
  s.kind = experiment == Experiment::spread_many ? SpreadingKind::distributed : SpreadingKind::two_community;
  s.r_sig = rs;
  s.input_value = input_value;
  s.w_min_in = w_min_in;
  s.w_max_in = w_max_in;
  s.input_gain = input_gain;
  s.eps_eq = eps_eq;
  s.max_steps = max_steps;
  s.subtract_baseline = subtract_baseline;
  s.activation = activation();
  s.cycles = cycles();
  s.rng_seed = seed;
  return s;
}

CycleDetection SweepConfig::cycles() const { return {quantum, max_transient, max_period}; }

SweepConfig preset(Experiment e) {
  SweepConfig c;
  c.experiment = e;
  c.act_c = 10.0;
  c.mu = grid(0.0, 0.5, 0.05);
  switch (e) {
    case Experiment::mc:
    case Experiment::spectrum:
      c.w_s = {1.13};
      c.realizations = 32;
      break;
    case Experiment::spread_two:
      c.n_communities = 2;
      c.w_s = {1.13};
      c.realizations = 48;
      break;
    case Experiment::spread_many:
      c.w_s = {1.13};
      c.realizations = 48;
      break;
    case Experiment::recall:
    case Experiment::attractors:
      c.node_degree = 7;
      c.w_min = -0.1;
      c.w_min_in = -0.1;
      c.input_gain = 2.0;
      c.realizations = 16;
      break;
  }
  return c;
}

SweepConfig parse_config(std::istream& in, const std::string& origin) {
  SweepConfig cfg = preset(Experiment::mc);
  std::string line;
  std::size_t line_no = 0;
  bool any_key = false;
  std::map<std::string, std::size_t> seen;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = origin + ":" + std::to_string(line_no) + ": ";
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (const auto [it, fresh] = seen.emplace(key, line_no); !fresh) {
      throw ConfigError(where + key + ": already set on line " + std::to_string(it->second));
    }
    try {
      if (key == "experiment") {
        if (any_key) throw ConfigError("experiment: must be the first key");
        cfg = preset(parse_experiment(value));
      } else {
        cfg.set(key, value);
      }
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
    any_key = true;
  }
  return cfg;
}

SweepConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  return parse_config(in, path);
}

std::string serialize_config(const SweepConfig& cfg) {
  std::string out;
  for (const auto& [name, f] : fields()) {
    out += name;
    out += " = ";
    out += f.get(cfg);
    out += '\n';
  }
  return out;
}

}  // namespace modesn
