#include <doctest.h>

#include <numeric>
#include <set>

#include "modesn/tasks.hpp"

using namespace modesn;

namespace {

WeightedNetwork network(std::size_t n, std::size_t c, std::size_t deg, double mu, WeightParams w, std::uint64_t seed) {
  return assign_weights(generate_modular_graph(ModularGraphSpec::equal_communities(n, c, deg, mu, seed)), w, seed + 1);
}

MCTaskConfig small_mc(std::uint64_t seed) {
  MCTaskConfig cfg;
  cfg.washout = 100;
  cfg.train_len = 400;
  cfg.validation_len = 400;
  cfg.max_delay = 20;
  cfg.activation.c = 10.0;
  cfg.rng_seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("memory capacity is deterministic and sums its delays") {
  const auto net = network(200, 20, 6, 0.2, {-0.2, 1.0, 1.13, false}, 3);
  const auto a = run_mc_task(net, small_mc(4));
  const auto b = run_mc_task(net, small_mc(4));
  CHECK(a.mc_k == b.mc_k);
  CHECK(a.mc == b.mc);
  REQUIRE(a.mc_k.size() == 20);
  CHECK(a.mc == std::accumulate(a.mc_k.begin(), a.mc_k.end(), 0.0));
  for (double v : a.mc_k) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("long delays are trained per delay beyond the washout") {
  const auto net = network(100, 10, 6, 0.2, {-0.2, 1.0, 1.13, false}, 5);
  MCTaskConfig cfg = small_mc(6);
  cfg.washout = 10;
  cfg.max_delay = 30;
  const auto r = run_mc_task(net, cfg);
  CHECK(r.mc_k.size() == 30);
  CHECK(r.mc == std::accumulate(r.mc_k.begin(), r.mc_k.end(), 0.0));
}

TEST_CASE("dead reservoir has no memory") {
  const auto net = network(500, 50, 6, 0.2, {-0.2, 1.0, 0.0, false}, 7);
  MCTaskConfig cfg;
  cfg.rng_seed = 8;
  // States still follow the current input, so each delay scores the chance
  // correlation of two independent bit streams, about 1 / validation_len.
  const auto r = run_mc_task(net, cfg);
  const double chance = static_cast<double>(cfg.max_delay) / static_cast<double>(cfg.validation_len);
  CHECK(r.mc < 3.0 * chance);
  for (double v : r.mc_k) CHECK(v < 0.02);

  // The readout also sees u(t) directly. With constant states that column is
  // all that is left, and it spans the same space as the driven states above.
  cfg.input_gain = 0.0;
  const auto silent = run_mc_task(net, cfg);
  CHECK(silent.mc == doctest::Approx(r.mc).epsilon(1e-9));
}

TEST_CASE("in-sample delay-1 score matches a direct recomputation") {
  const auto net = network(200, 20, 6, 0.2, {-0.2, 1.0, 1.13, false}, 9);
  const auto r = run_mc_task(net, small_mc(10));
  CHECK(r.mc_k_train[0] >= r.mc_k[0] - 0.2);
  CHECK(r.mc_k_train[0] <= 1.0);
}

TEST_CASE("recall sequence generation") {
  const auto all = generate_recall_sequences(1024, 1);
  CHECK(std::set(all.begin(), all.end()).size() == 1024);
  const auto some = generate_recall_sequences(200, 2);
  CHECK(some.size() == 200);
  CHECK(std::set(some.begin(), some.end()).size() == 200);
  CHECK(generate_recall_sequences(200, 2) == some);
  for (const auto& s : some) {
    CHECK(s.size() == 5);
    for (auto v : s) CHECK(v < 4);
  }
  CHECK_THROWS(generate_recall_sequences(1025, 1));
  const auto bits = sequence_bits(RecallSequence{0, 3, 1, 1, 2}, 4);
  CHECK(bits.rows() == 4);
  CHECK(bits.cols() == 5);
  CHECK(bits.colwise().sum().isOnes());
  CHECK(bits(3, 1) == 1.0);
}

TEST_CASE("a single sequence is always recalled") {
  const auto net = network(500, 50, 7, 0.1, {-0.1, 1.0, 1.0, false}, 11);
  RecallTaskConfig cfg;
  cfg.n_sequences = 1;
  cfg.delta_t = 0;
  cfg.rng_seed = 12;
  CHECK(run_recall_task(net, cfg).fraction_perfect == 1.0);
  cfg.cue_enabled = false;
  CHECK(run_recall_task(net, cfg).fraction_perfect == 1.0);
}

TEST_CASE("recall scoring is all or nothing") {
  Eigen::MatrixXd target(3, 2);
  target << 1, 0, 0, 1, 1, 1;
  Eigen::MatrixXd pred = target;
  pred(2, 1) = 0;
  const auto r = score_recall(pred, target);
  CHECK(r.fraction_perfect == 0.5);
  CHECK(r.passed == std::vector<bool>{true, false});
}

TEST_CASE("recall runs are deterministic") {
  const auto net = network(200, 20, 7, 0.1, {-0.1, 1.0, 1.0, false}, 13);
  RecallTaskConfig cfg;
  cfg.n_sequences = 30;
  cfg.activation.c = 10.0;
  cfg.rng_seed = 14;
  const auto a = run_recall_task(net, cfg);
  CHECK(a.passed == run_recall_task(net, cfg).passed);
  CHECK(a.fraction_perfect >= 0.0);
  CHECK(a.fraction_perfect <= 1.0);
}
