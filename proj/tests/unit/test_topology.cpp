#include <doctest.h>

#include <cmath>
#include <set>

#include "modesn/rng.hpp"
#include "modesn/topology.hpp"

using namespace modesn;

namespace {

// Independent count of undirected inter-community edges.
double count_mu(const WeightedNetwork& net) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (const auto& e : net.edges()) pairs.emplace(std::min(e.source, e.target), std::max(e.source, e.target));
  std::size_t inter = 0;
  for (const auto& [a, b] : pairs) inter += net.community_of()[a] != net.community_of()[b];
  return pairs.empty() ? 0.0 : static_cast<double>(inter) / static_cast<double>(pairs.size());
}

WeightedNetwork mc_network(double mu, std::uint64_t seed) {
  const auto g = generate_modular_graph(ModularGraphSpec::equal_communities(500, 50, 6, mu, seed));
  return assign_weights(g, {-0.2, 1.0, 1.13, false}, seed + 1000);
}

}  // namespace

TEST_CASE("generated graphs have exact degree and symmetric topology") {
  for (double mu : {0.0, 0.1, 0.25, 0.5}) {
    const auto g = generate_modular_graph(ModularGraphSpec::equal_communities(500, 50, 6, mu, 3));
    CAPTURE(mu);
    CHECK(g.edges().size() == 500 * 6);
    for (auto d : g.degrees()) CHECK(d == 6);
    std::set<std::pair<std::uint32_t, std::uint32_t>> directed;
    for (const auto& e : g.edges()) {
      CHECK(e.source != e.target);
      directed.emplace(e.source, e.target);
    }
    for (const auto& [s, t] : directed) CHECK(directed.count({t, s}) == 1);
  }
}

TEST_CASE("mu = 0 leaves communities disconnected") {
  const auto g = generate_modular_graph(ModularGraphSpec::equal_communities(500, 50, 6, 0.0, 9));
  for (const auto& e : g.edges()) CHECK(g.community_of()[e.source] == g.community_of()[e.target]);
  CHECK(measured_mu(g) == 0.0);
}

TEST_CASE("measured mu tracks the requested fraction") {
  for (double mu : {0.1, 0.3, 0.5}) {
    double sum = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto g = generate_modular_graph(ModularGraphSpec::equal_communities(500, 50, 6, mu, s));
      const double m = measured_mu(g);
      CHECK(m == doctest::Approx(count_mu(g)).epsilon(1e-15));
      sum += m;
    }
    CHECK(std::abs(sum / 20.0 - mu) <= 0.01);
  }
}

TEST_CASE("two equal communities, odd bridge count falls back to the nearest feasible value") {
  // 500 * 6 / 2 = 1500 edges; 0.1 * 1500 = 150 bridges is even and feasible.
  const auto g = generate_modular_graph(ModularGraphSpec::equal_communities(500, 2, 6, 0.1, 4));
  CHECK(measured_mu(g) == doctest::Approx(0.1).epsilon(1e-12));
  const auto h = generate_modular_graph(ModularGraphSpec::equal_communities(500, 2, 6, 0.101, 4));
  CHECK(std::abs(measured_mu(h) - 0.101) <= 1.0 / 1500.0 + 1e-12);
}

TEST_CASE("single community has mu 0") {
  const auto g = generate_modular_graph(ModularGraphSpec::equal_communities(60, 1, 4, 0.0, 1));
  CHECK(measured_mu(g) == 0.0);
}

TEST_CASE("generation is deterministic in the seed") {
  const auto spec = ModularGraphSpec::equal_communities(200, 20, 6, 0.2, 77);
  CHECK(generate_modular_graph(spec) == generate_modular_graph(spec));
  auto other = spec;
  other.rng_seed = 78;
  CHECK_FALSE(generate_modular_graph(spec) == generate_modular_graph(other));
}

TEST_CASE("invalid specs are rejected") {
  CHECK_THROWS_AS(ModularGraphSpec::equal_communities(500, 50, 6, 1.0, 0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(ModularGraphSpec::equal_communities(11, 1, 3, 0.0, 0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(ModularGraphSpec::equal_communities(500, 50, 10, 0.0, 0).validate(), std::invalid_argument);
}

TEST_CASE("weights lie in the scaled range and are asymmetric") {
  const auto g = generate_modular_graph(ModularGraphSpec::equal_communities(500, 50, 6, 0.2, 5));
  const auto w = assign_weights(g, {-0.2, 1.0, 1.13, false}, 6);
  std::size_t asymmetric = 0;
  const auto dense = w.dense();
  for (const auto& e : w.edges()) {
    CHECK(e.weight >= -0.2 * 1.13);
    CHECK(e.weight <= 1.0 * 1.13);
    asymmetric += dense(e.target, e.source) != dense(e.source, e.target);
  }
  CHECK(asymmetric > w.edges().size() / 2);

  const auto s = assign_weights(g, {-0.1, 1.0, 1.0, true}, 6);
  const auto ds = s.dense();
  CHECK((ds - ds.transpose()).cwiseAbs().maxCoeff() == 0.0);

  const auto z = assign_weights(g, {-0.2, 1.0, 0.0, false}, 6);
  CHECK(z.dense().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dense and ell views agree") {
  const auto net = mc_network(0.3, 2);
  const auto d = net.dense();
  const auto e = net.ell();
  Eigen::MatrixXd rebuilt = Eigen::MatrixXd::Zero(500, 500);
  for (std::size_t r = 0; r < e.rows(); ++r) {
    for (std::size_t s = 0; s < e.width(); ++s) rebuilt(static_cast<Eigen::Index>(r), e.col_at(r, s)) += e.value_at(r, s);
  }
  CHECK((rebuilt - d).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("spectrum of small matrices") {
  Eigen::Matrix2d a;
  a << 0, 2, 2, 0;
  const auto r = spectrum(Eigen::MatrixXd(a));
  CHECK(r.lambda1_abs == doctest::Approx(2.0));
  CHECK(r.lambda2_abs == doctest::Approx(2.0));
  CHECK(r.spectral_gap == doctest::Approx(0.0));

  const auto c = spectrum(Eigen::MatrixXd(-3.0 * Eigen::MatrixXd::Identity(4, 4)));
  CHECK(c.lambda1_abs == doctest::Approx(3.0));
  CHECK(c.lambda2_abs == doctest::Approx(3.0));
}

TEST_CASE("spectral radius rescaling") {
  for (double mu : {0.0, 0.2, 0.5}) {
    const auto net = mc_network(mu, 11);
    const auto before = spectrum(net);
    const auto same = rescale_to_spectral_radius(net, before.lambda1_abs);
    CHECK((same.dense() - net.dense()).cwiseAbs().maxCoeff() < 1e-12);
    const auto unit = rescale_to_spectral_radius(net, 1.0);
    CHECK(std::abs(spectrum(unit).lambda1_abs - 1.0) < 1e-6);
  }
  const auto empty = generate_modular_graph(ModularGraphSpec::equal_communities(100, 10, 4, 0.2, 1));
  CHECK_THROWS_AS(rescale_to_spectral_radius(empty, 1.0), std::domain_error);
}

TEST_CASE("repair escapes a configuration with no direct fixing swap") {
  // This seed leaves one same-community bridge on each side whose direct swap
  // would duplicate an existing edge.
  const std::uint64_t seed = modesn::JobSeeds::from(1345700012630037065ULL).graph;
  const auto g = generate_modular_graph(ModularGraphSpec::equal_communities(500, 2, 6, 0.5, seed));
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  for (const auto& e : g.edges()) {
    CHECK(e.source != e.target);
    CHECK(seen.insert({e.source, e.target}).second);
  }
  CHECK(measured_mu(g) == doctest::Approx(0.5).epsilon(1e-12));
}
