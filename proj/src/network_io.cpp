#include "modesn/network_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace modesn {
namespace {

[[noreturn]] void parse_error(std::size_t line_no, const std::string& what) {
  throw std::runtime_error("network file line " + std::to_string(line_no) + ": " + what);
}

bool next_content_line(std::istream& in, std::string& line, std::size_t& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    return true;
  }
  return false;
}

}  // namespace

std::string format_real(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_network(std::ostream& out, const WeightedNetwork& network) {
  out << "# modesn network\n";
  out << "n_nodes " << network.n_nodes() << '\n';
  out << "communities\n";
  const auto community = network.community_of();
  for (std::size_t i = 0; i < network.n_nodes(); ++i) out << i << ' ' << community[i] << '\n';
  out << "edges\n";
  for (const Edge& e : network.edges()) {
    out << e.source << ' ' << e.target << ' ' << format_real(e.weight) << '\n';
  }
}

WeightedNetwork read_network(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!next_content_line(in, line, line_no)) parse_error(line_no, "missing n_nodes header");
  std::istringstream header(line);
  std::string key;
  std::size_t n = 0;
  if (!(header >> key >> n) || key != "n_nodes") parse_error(line_no, "expected 'n_nodes <count>'");
  if (!next_content_line(in, line, line_no) || line.rfind("communities", 0) != 0) {
    parse_error(line_no, "expected 'communities'");
  }
  std::vector<std::uint32_t> community(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!next_content_line(in, line, line_no)) parse_error(line_no, "truncated community block");
    std::istringstream row(line);
    std::size_t node = 0;
    std::uint32_t c = 0;
    if (!(row >> node >> c) || node != i) parse_error(line_no, "expected '<node> <community>' in node order");
    community[i] = c;
  }
  if (!next_content_line(in, line, line_no) || line.rfind("edges", 0) != 0) {
    parse_error(line_no, "expected 'edges'");
  }
  std::vector<Edge> edges;
  while (next_content_line(in, line, line_no)) {
    std::istringstream row(line);
    std::string weight_text;
    Edge e;
    if (!(row >> e.source >> e.target >> weight_text)) parse_error(line_no, "expected 'source target weight'");
    try {
      std::size_t used = 0;
      e.weight = std::stod(weight_text, &used);
      if (used != weight_text.size()) throw std::invalid_argument(weight_text);
    } catch (const std::exception&) {
      parse_error(line_no, "bad weight '" + weight_text + "'");
    }
    if (e.source >= n || e.target >= n) parse_error(line_no, "edge endpoint out of range");
    edges.push_back(e);
  }
  return WeightedNetwork(n, std::move(community), std::move(edges));
}

void save_network(const std::string& path, const WeightedNetwork& network) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_network(out, network);
  if (!out) throw std::runtime_error("failed writing " + path);
}

WeightedNetwork load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_network(in);
}

}  // namespace modesn
