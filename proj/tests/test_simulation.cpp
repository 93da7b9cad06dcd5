#include <gtest/gtest.h>

#include <random>

#include "pclf/gallery.hpp"
#include "pclf/graph_io.hpp"
#include "pclf/simulation.hpp"
#include "test_support.hpp"

namespace pclf {
namespace {

using namespace gallery;

NodeId b(const std::string& s) { return NodeId::base(s); }
NodeId w(const std::string& s, std::vector<std::string> word) { return NodeId::word(b(s), std::move(word)); }

TEST(FindSimulation, Reflexive) {
  for (const auto& e : entries()) {
    auto sim = find_simulation(e.graph, e.graph);
    ASSERT_TRUE(sim) << e.name;
    for (const auto& n : e.graph.nodes()) EXPECT_EQ((*sim)(n), n);
  }
}

TEST(FindSimulation, G1AndG2AreIncomparable) {
  EXPECT_FALSE(find_simulation(g1(), g2()));
  EXPECT_FALSE(find_simulation(g2(), g1()));
}

TEST(FindSimulation, LiftedG1SimulatesG2) {
  auto sim = find_simulation(fwd_comp_lift(g1(), 1), g2());
  ASSERT_TRUE(sim);
  EXPECT_EQ((*sim)(b("b'")), w("b", {"1"}));
  EXPECT_EQ((*sim)(b("c'")), w("c", {"2"}));
  EXPECT_TRUE(find_simulation(bwd_comp_lift(g2(), 1), g1()));
}

TEST(FindSimulation, PhiDoesNotSimulatePsi) { EXPECT_FALSE(find_simulation(g_phi(), g_psi())); }

TEST(FindSimulation, AlphabetMismatch) {
  EXPECT_THROW(find_simulation(g0(), make_graph(Alphabet::numbered(3), {"a"}, {})), InvalidInput);
}

TEST(FindSimulation, AgreesWithExhaustiveMaps) {
  std::mt19937_64 rng(71);
  int yes = 0;
  for (int trial = 0; trial < 400; ++trial) {
    auto g1 = testing::random_graph(rng, 1 + trial % 4, 2, 0.4);
    auto g2 = testing::random_graph(rng, 1 + (trial / 4) % 4, 2, 0.3);
    auto sim = find_simulation(g1, g2);
    ASSERT_EQ(sim.has_value(), testing::brute_simulates(g1, g2)) << render_graph(g1) << render_graph(g2);
    if (sim) {
      ++yes;
      EXPECT_FALSE(SimulationWitness::first_violation(g1, g2, sim->mapping()));
    }
  }
  EXPECT_GT(yes, 20);
}

TEST(FindSimulation, Composes) {
  std::mt19937_64 rng(73);
  int chained = 0;
  for (int trial = 0; trial < 300; ++trial) {
    auto a = testing::random_graph(rng, 3, 2, 0.5);
    auto bb = testing::random_graph(rng, 3, 2, 0.35);
    auto c = testing::random_graph(rng, 3, 2, 0.25);
    auto ab = find_simulation(a, bb);
    auto bc = find_simulation(bb, c);
    if (!ab || !bc) continue;
    ++chained;
    std::map<NodeId, NodeId> composed;
    for (const auto& [k, v] : bc->mapping()) composed.emplace(k, (*ab)(v));
    EXPECT_NO_THROW(SimulationWitness(a, c, composed));
  }
  EXPECT_GT(chained, 5);
}

TEST(SimulationWitness, RejectsInvalidMaps) {
  std::map<NodeId, NodeId> r{{b("b'"), b("b")}, {b("c'"), b("c")}};
  EXPECT_THROW(SimulationWitness(g1(), g2(), r), InvalidInput);
  EXPECT_THROW(SimulationWitness(g1(), g2(), {{b("b'"), b("b")}}), InvalidInput);
}

TEST(SimulatesCompLift, G1SimulatesG2AtDepthOne) {
  auto v = simulates_comp_lift(g1(), g2(), 1);
  ASSERT_TRUE(is_yes(v));
  const auto& yes = std::get<SimYes>(v);
  EXPECT_EQ(yes.level, 1u);
  EXPECT_EQ(yes.witness(b("b'")), w("b", {"1"}));
  EXPECT_EQ(yes.witness(b("c'")), w("c", {"2"}));
}

TEST(SimulatesCompLift, PhiPsiStructuralRefutation) {
  auto v = simulates_comp_lift(g_phi(), g_psi(), 3);
  ASSERT_TRUE(is_no(v));
  EXPECT_NE(std::get<SimNo>(v).refutation.find("a'"), std::string::npos);
  for (std::size_t t = 0; t <= 3; ++t) EXPECT_FALSE(find_simulation(fwd_comp_lift(g_phi(), t), g_psi()));
}

TEST(SimulatesCompLift, Reflexive) {
  auto v = simulates_comp_lift(g1(), g1(), 0);
  ASSERT_TRUE(is_yes(v));
  EXPECT_EQ(std::get<SimYes>(v).level, 0u);
}

TEST(SimulatesCompLift, RejectsDisconnectedTarget) {
  EXPECT_THROW(simulates_comp_lift(g0(), disjoint_union(g0(), g0()), 1), InvalidInput);
}

TEST(SimulatesCompLift, RefutationsAreConsistentWithSearch) {
  std::mt19937_64 rng(79);
  int refuted = 0;
  for (int trial = 0; trial < 150; ++trial) {
    auto g = testing::random_graph(rng, 3, 2, 0.35);
    auto h = testing::random_graph(rng, 2 + trial % 2, 2, 0.45);
    if (!is_weakly_connected(h)) continue;
    auto v = simulates_comp_lift(g, h, 2);
    if (is_no(v)) {
      ++refuted;
      for (std::size_t t = 0; t <= 2; ++t) EXPECT_FALSE(find_simulation(fwd_comp_lift(g, t), h));
    } else if (is_yes(v)) {
      const auto& y = std::get<SimYes>(v);
      EXPECT_FALSE(SimulationWitness::first_violation(fwd_comp_lift(g, y.level), h, y.witness.mapping()));
    }
  }
  EXPECT_GT(refuted, 5);
}

TEST(SimulatesSumLift, G1NeverSimulatesG2) {
  auto v = simulates_sum_lift(g1(), g2(), 4);
  ASSERT_TRUE(is_unknown(v));
  EXPECT_EQ(std::get<SimUnknown>(v).tmax, 4u);
}

TEST(SimulatesSumLift, Reflexive) {
  auto v = simulates_sum_lift(g1(), g1(), 1);
  ASSERT_TRUE(is_yes(v));
  EXPECT_EQ(std::get<SimYes>(v).witness(b("b")), NodeId::mset({b("b")}));
}

TEST(SimulatesSumLift, GAlphaSimulatesG0AtDepthTwo) {
  auto v = simulates_sum_lift(g_alpha(), g0(), 2);
  ASSERT_TRUE(is_yes(v));
  const auto& y = std::get<SimYes>(v);
  EXPECT_EQ(y.level, 2u);
  EXPECT_EQ(y.witness(b("a")), NodeId::mset({b("a"), b("b")}));
}

TEST(SimulatesTransLift, PhiSimulatesPsi) {
  auto t = transitive_comp_lift(g_phi(), 1);
  auto sim = find_simulation(t.graph, g_psi());
  ASSERT_TRUE(sim);
  EXPECT_EQ((*sim)(b("a'")), b("a"));
  EXPECT_EQ((*sim)(b("b'")), w("a", {"2"}));
  auto v = simulates_trans_lift(g_phi(), g_psi(), 2);
  ASSERT_TRUE(is_yes(v));
  EXPECT_EQ(std::get<SimYes>(v).level, 1u);
}

TEST(SimulatesBwdCompLift, G2SimulatesG1) {
  auto v = simulates_bwd_comp_lift(g2(), g1(), 2);
  ASSERT_TRUE(is_yes(v));
  EXPECT_EQ(std::get<SimYes>(v).level, 1u);
}

}  // namespace
}  // namespace pclf
