#include <doctest.h>

#include <sstream>

#include "modesn/network_io.hpp"
#include "modesn/topology.hpp"

using namespace modesn;

TEST_CASE("network text round trip is exact") {
  const auto g = generate_modular_graph(ModularGraphSpec::equal_communities(120, 12, 6, 0.3, 8));
  const auto net = assign_weights(g, {-0.2, 1.0, 1.13, false}, 9);
  std::stringstream buf;
  write_network(buf, net);
  const auto back = read_network(buf);
  CHECK(back == net);
}

TEST_CASE("malformed network files report the line") {
  std::stringstream bad("# modesn network\nn_nodes 2\ncommunities\n0 0\n1 0\nedges\n0 5 1.0\n");
  CHECK_THROWS_WITH_AS(read_network(bad), doctest::Contains("line"), std::runtime_error);
}
