#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "rankbench/inference.hpp"
#include "rankbench/transform.hpp"
#include "test_util.hpp"

using namespace rankbench;
using rbtest::all_variable_names;
using rbtest::random_evidence;
using rbtest::random_network;
using rbtest::random_rank_network;

namespace {

Network fault_chain() {
  Network net;
  net.add_variable("F", {"absent", "present"});
  net.add_variable("E", {"absent", "present"});
  net.set_prior("F", {0.8, 0.2});
  net.set_table("E", {"F"}, {{0.9, 0.1}, {0.1, 0.9}});
  return net;
}

}  // namespace

TEST_CASE("posterior on a two-variable chain matches the hand computation") {
  Network net = fault_chain();
  auto post = posterior_marginals<SumProductAlgebra>(net, {{"E", "present"}}, {"F"});
  REQUIRE(post.size() == 1);
  // P(F=present, E=present) = 0.2*0.9 = 0.18; P(E=present) = 0.18 + 0.8*0.1 = 0.26
  CHECK(post[0].dist[1] == doctest::Approx(0.18 / 0.26).epsilon(1e-12));
  CHECK(post[0].dist[0] + post[0].dist[1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("without evidence a root's posterior is its prior") {
  Network net = fault_chain();
  auto post = posterior_marginals<SumProductAlgebra>(net, {}, {"F"});
  CHECK(post[0].dist[0] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(post[0].dist[1] == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("rank chain normalizes by subtracting the joint minimum") {
  RankNetwork net;
  net.add_variable("F", {"absent", "present"});
  net.add_variable("E", {"absent", "present"});
  net.set_prior("F", {Rank(0), Rank(2)});
  net.set_table("E", {"F"}, {{Rank(0), Rank(3)}, {Rank(1), Rank(0)}});
  auto post = posterior_marginals<MinSumAlgebra>(net, {{"E", "present"}}, {"F"});
  // joint ranks: F=present 2+0=2, F=absent 0+3=3; subtract the min 2
  CHECK(post[0].dist[1] == Rank(0));
  CHECK(post[0].dist[0] == Rank(1));
}

TEST_CASE("the oracle agrees with itself on the chain") {
  Network net = fault_chain();
  auto post = enumerate_oracle<SumProductAlgebra>(net, {{"E", "present"}}, {"F"});
  CHECK(post[0].dist[1] == doctest::Approx(0.18 / 0.26).epsilon(1e-12));
}

TEST_CASE("elimination matches the enumeration oracle on random networks") {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> size_dist(2, 6);
  for (int trial = 0; trial < 200; ++trial) {
    Network net = random_network(rng, size_dist(rng));
    Evidence ev = random_evidence(rng, net, 2);
    auto targets = all_variable_names(net);

    auto ve = posterior_marginals<SumProductAlgebra>(net, ev, targets);
    auto oracle = enumerate_oracle<SumProductAlgebra>(net, ev, targets);
    REQUIRE(ve.size() == oracle.size());
    for (std::size_t t = 0; t < ve.size(); ++t)
      for (std::size_t v = 0; v < ve[t].dist.size(); ++v)
        CHECK(std::abs(ve[t].dist[v] - oracle[t].dist[v]) < 1e-9);
  }
}

TEST_CASE("rank elimination matches the oracle exactly") {
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> size_dist(2, 6);
  for (int trial = 0; trial < 200; ++trial) {
    RankNetwork net = random_rank_network(rng, size_dist(rng));
    Evidence ev = random_evidence(rng, net, 2);
    std::vector<std::string> targets;
    for (const auto& v : net.variables()) targets.push_back(v.name);

    auto ve = posterior_marginals<MinSumAlgebra>(net, ev, targets);
    auto oracle = enumerate_oracle<MinSumAlgebra>(net, ev, targets);
    REQUIRE(ve.size() == oracle.size());
    for (std::size_t t = 0; t < ve.size(); ++t)
      CHECK(ve[t].dist == oracle[t].dist);
  }
}

TEST_CASE("posteriors do not depend on the elimination order") {
  std::mt19937 rng(5150);
  std::uniform_int_distribution<int> size_dist(4, 10);
  for (int trial = 0; trial < 50; ++trial) {
    Network net = random_network(rng, size_dist(rng), false);
    Evidence ev = random_evidence(rng, net, 2);
    const std::string target = net.variable(0).name;
    if (ev.count(target)) continue;

    auto order = elimination_order(net, ev, {target});
    auto reversed = order;
    std::reverse(reversed.begin(), reversed.end());

    auto a = posterior_marginal_with_order<SumProductAlgebra>(net, ev, target, order);
    auto b = posterior_marginal_with_order<SumProductAlgebra>(net, ev, target, reversed);
    for (std::size_t v = 0; v < a.dist.size(); ++v)
      CHECK(std::abs(a.dist[v] - b.dist[v]) < 1e-9);
  }
}

TEST_CASE("rank posteriors are order-invariant exactly") {
  std::mt19937 rng(424242);
  for (int trial = 0; trial < 50; ++trial) {
    RankNetwork net = random_rank_network(rng, 8);
    Evidence ev = random_evidence(rng, net, 2);
    const std::string target = net.variable(0).name;
    if (ev.count(target)) continue;

    auto order = elimination_order(net, ev, {target});
    auto reversed = order;
    std::reverse(reversed.begin(), reversed.end());

    auto a = posterior_marginal_with_order<MinSumAlgebra>(net, ev, target, order);
    auto b = posterior_marginal_with_order<MinSumAlgebra>(net, ev, target, reversed);
    CHECK(a.dist == b.dist);
  }
}

TEST_CASE("contradictory evidence raises an error naming the evidence") {
  Network net;
  net.add_variable("A", {"absent", "present"});
  net.add_variable("B", {"absent", "present"});
  net.set_prior("A", {1.0, 0.0});
  net.set_table("B", {"A"}, {{0.5, 0.5}, {0.5, 0.5}});

  CHECK_THROWS_WITH_AS(posterior_marginals<SumProductAlgebra>(net, {{"A", "present"}}, {"B"}),
                       doctest::Contains("A=present"), ContradictoryEvidenceError);
  // same when the query is only about observed variables
  CHECK_THROWS_AS(posterior_marginals<SumProductAlgebra>(net, {{"A", "present"}}, {"A"}),
                  ContradictoryEvidenceError);
  CHECK_THROWS_AS(enumerate_oracle<SumProductAlgebra>(net, {{"A", "present"}}, {"B"}),
                  ContradictoryEvidenceError);

  RankNetwork rnet;
  rnet.add_variable("A", {"absent", "present"});
  rnet.set_prior("A", {Rank(0), Rank::infinity()});
  CHECK_THROWS_AS(posterior_marginals<MinSumAlgebra>(rnet, {{"A", "present"}}, {"A"}),
                  ContradictoryEvidenceError);
}

TEST_CASE("querying an observed variable returns certainty at the observation") {
  Network net = fault_chain();
  auto post = posterior_marginals<SumProductAlgebra>(net, {{"F", "present"}}, {"F", "E"});
  CHECK(post[0].dist[0] == 0.0);
  CHECK(post[0].dist[1] == 1.0);
  CHECK(post[1].dist[1] == doctest::Approx(0.9));

  auto oracle = enumerate_oracle<SumProductAlgebra>(net, {{"F", "present"}}, {"F", "E"});
  CHECK(oracle[0].dist[1] == doctest::Approx(1.0));
}

TEST_CASE("the oracle refuses oversized state spaces") {
  Network net;
  for (int i = 0; i < 21; ++i) {
    net.add_variable("v" + std::to_string(i), {"absent", "present"});
    net.set_prior("v" + std::to_string(i), {0.5, 0.5});
  }
  CHECK_THROWS_AS(enumerate_oracle<SumProductAlgebra>(net, {}, {"v0"}), StateSpaceError);
}

TEST_CASE("empty target lists give empty results") {
  Network net = fault_chain();
  CHECK(enumerate_oracle<SumProductAlgebra>(net, {}, {}).empty());
  CHECK(posterior_marginals<SumProductAlgebra>(net, {}, {}).empty());
}

TEST_CASE("elimination order covers exactly the free non-target variables") {
  Network net;
  net.add_variable("A", {"absent", "present"});
  net.add_variable("B", {"absent", "present"});
  net.add_variable("C", {"absent", "present"});
  net.set_prior("A", {0.5, 0.5});
  net.set_table("B", {"A"}, {{0.5, 0.5}, {0.5, 0.5}});
  net.set_table("C", {"B"}, {{0.5, 0.5}, {0.5, 0.5}});

  auto order = elimination_order(net, {}, {"C"});
  REQUIRE(order.size() == 2);
  CHECK(std::count(order.begin(), order.end(), "A") == 1);
  CHECK(std::count(order.begin(), order.end(), "B") == 1);

  auto none = elimination_order(net, {{"A", "absent"}, {"B", "absent"}}, {"C"});
  CHECK(none.empty());
}

TEST_CASE("rank-zero sets coincide with dominant numeric posteriors in the small-base limit") {
  std::mt19937 rng(777);
  const double base = 1e-4;
  std::uniform_int_distribution<int> size_dist(2, 6);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    RankNetwork rnet = random_rank_network(rng, size_dist(rng));
    Network pnet = kappa_as_probability(rnet, base);
    Evidence ev = random_evidence(rng, rnet, 2);
    std::vector<std::string> targets;
    for (const auto& v : rnet.variables())
      if (!ev.count(v.name)) targets.push_back(v.name);
    if (targets.empty()) continue;

    auto ranks = posterior_marginals<MinSumAlgebra>(rnet, ev, targets);
    auto probs = posterior_marginals<SumProductAlgebra>(pnet, ev, targets);
    for (std::size_t t = 0; t < targets.size(); ++t) {
      double maxp = *std::max_element(probs[t].dist.begin(), probs[t].dist.end());
      for (std::size_t v = 0; v < ranks[t].dist.size(); ++v) {
        const bool plausible = ranks[t].dist[v] == Rank(0);
        const bool dominant = probs[t].dist[v] >= maxp * std::sqrt(base);
        CHECK(plausible == dominant);
        ++checked;
      }
    }
  }
  CHECK(checked > 200);
}
