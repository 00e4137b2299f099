// Plain-text edge-list serialization of WeightedNetwork.
//
//   # modesn network
//   n_nodes 4
//   communities
//   0 0
//   1 0
//   ...
//   edges
//   0 1 0.25
//   ...
//
// One `node community` line per node, then one `source target weight` line per
// directed edge. Reals use 17 significant digits, so a write/read cycle is exact.
#pragma once

#include <iosfwd>
#include <string>

#include "modesn/topology.hpp"

namespace modesn {

void write_network(std::ostream& out, const WeightedNetwork& network);
WeightedNetwork read_network(std::istream& in);

void save_network(const std::string& path, const WeightedNetwork& network);
WeightedNetwork load_network(const std::string& path);

/// "%.17g"
std::string format_real(double value);

}  // namespace modesn
