#include <gtest/gtest.h>

#include <cmath>

#include "undirectify/exact.hpp"
#include "undirectify/models.hpp"
#include "undirectify/rng.hpp"

using namespace undirectify;

namespace {

GraphDistribution dirichlet_pmf(int n, GraphKind kind, Rng& rng) {
  GraphDistribution dist(n, kind);
  long double total = 0.0L;
  std::vector<double> raw(dist.size());
  for (double& x : raw) {
    x = -std::log(1.0 - rng.next_double());
    total += x;
  }
  for (std::uint64_t c = 0; c < dist.size(); ++c)
    dist.set_mass(c, static_cast<double>(raw[c] / total));
  return dist;
}

}  // namespace

TEST(GraphDistribution, ValidateCatchesBadMass) {
  GraphDistribution dist(2, GraphKind::graph);
  dist.set_mass(0, 0.5);
  EXPECT_THROW(dist.validate(), std::domain_error);  // sums to 0.5
  dist.set_mass(1, 0.5);
  EXPECT_NO_THROW(dist.validate());
  dist.set_mass(0, -0.5);
  EXPECT_THROW(dist.validate(), std::domain_error);
}

TEST(GraphDistribution, SizeCaps) {
  EXPECT_NO_THROW(GraphDistribution(6, GraphKind::graph));
  EXPECT_THROW(GraphDistribution(7, GraphKind::graph), std::invalid_argument);
  EXPECT_NO_THROW(GraphDistribution(5, GraphKind::digraph));
  EXPECT_THROW(GraphDistribution(6, GraphKind::digraph), std::invalid_argument);
}

TEST(PhiPushforward, PointMassOnEmptyDigraph) {
  const GraphDistribution push = phi_pushforward(GraphDistribution::point_mass(Digraph(3, {})));
  EXPECT_DOUBLE_EQ(push.mass(Graph(3, {}).encode()), 1.0);
  EXPECT_NEAR(push.total_mass(), 1.0, kExactTolerance);
}

TEST(PhiPushforward, DirectedGilbertBecomesGilbert) {
  // n=2, p=0.5: the edge appears with probability 1-(1-p)^2 = 0.75
  const auto push2 =
      phi_pushforward(exact_iag_distribution(EdgeProbabilityFn::constant(2, 0.5, false)));
  EXPECT_NEAR(push2.mass(1), 0.75, kExactTolerance);
  EXPECT_NEAR(push2.mass(0), 0.25, kExactTolerance);

  // n=3, p=0.2: every graph mass matches Gilbert(0.36)
  const auto push3 =
      phi_pushforward(exact_iag_distribution(EdgeProbabilityFn::constant(3, 0.2, false)));
  const auto gilbert = exact_ieg_distribution(EdgeProbabilityFn::constant(3, 0.36, true));
  for (std::uint64_t code = 0; code < push3.size(); ++code)
    EXPECT_NEAR(push3.mass(code), gilbert.mass(code), kExactTolerance);
}

TEST(PhiPushforward, ConservesMassOnRandomInputs) {
  Rng rng(5);
  for (int n = 2; n <= 4; ++n) {
    for (int trial = 0; trial < 5; ++trial) {
      Rng local = rng.split(n * 100 + trial);
      const GraphDistribution dist = dirichlet_pmf(n, GraphKind::digraph, local);
      const GraphDistribution push = phi_pushforward(dist);
      EXPECT_NEAR(push.total_mass(), 1.0, kExactTolerance);
    }
  }
}

TEST(TvDistance, Examples) {
  Rng rng(6);
  const GraphDistribution a = dirichlet_pmf(3, GraphKind::graph, rng);
  EXPECT_DOUBLE_EQ(tv_distance(a, a), 0.0);

  GraphDistribution left(2, GraphKind::graph), right(2, GraphKind::graph);
  left.set_mass(0, 1.0);
  right.set_mass(1, 1.0);
  EXPECT_DOUBLE_EQ(tv_distance(left, right), 1.0);

  GraphDistribution g75(2, GraphKind::graph), g50(2, GraphKind::graph);
  g75.set_mass(1, 0.75);
  g75.set_mass(0, 0.25);
  g50.set_mass(1, 0.5);
  g50.set_mass(0, 0.5);
  EXPECT_NEAR(tv_distance(g75, g50), 0.25, kExactTolerance);

  GraphDistribution other_kind(2, GraphKind::digraph);
  EXPECT_THROW(tv_distance(g75, other_kind), std::invalid_argument);
  GraphDistribution other_n(3, GraphKind::graph);
  EXPECT_THROW(tv_distance(g75, other_n), std::invalid_argument);
}

TEST(WitnessEvents, ExamplesAndIdentity) {
  Rng rng(7);
  const GraphDistribution a = dirichlet_pmf(3, GraphKind::graph, rng);
  const WitnessEvents same = witness_events(a, a);
  EXPECT_TRUE(same.q_plus.empty());
  EXPECT_TRUE(same.q_minus.empty());
  EXPECT_DOUBLE_EQ(same.gap, 0.0);

  GraphDistribution g75(2, GraphKind::graph), g50(2, GraphKind::graph);
  g75.set_mass(1, 0.75);
  g75.set_mass(0, 0.25);
  g50.set_mass(1, 0.5);
  g50.set_mass(0, 0.5);
  const WitnessEvents w = witness_events(g75, g50);
  ASSERT_EQ(w.q_plus.size(), 1u);
  EXPECT_EQ(w.q_plus.front(), 1u);  // the one-edge graph
  EXPECT_NEAR(w.gap, 0.25, kExactTolerance);

  for (int trial = 0; trial < 50; ++trial) {
    Rng local = rng.split(trial);
    const GraphDistribution x = dirichlet_pmf(3, GraphKind::graph, local);
    const GraphDistribution y = dirichlet_pmf(3, GraphKind::graph, local);
    EXPECT_NEAR(witness_events(x, y).gap, tv_distance(x, y), kExactTolerance);
  }
}

TEST(EventProbability, Examples) {
  const auto gilbert = exact_ieg_distribution(EdgeProbabilityFn::constant(3, 0.5, true));
  EXPECT_NEAR(event_probability(gilbert, builtin_event("always-true")), 1.0, kExactTolerance);
  EXPECT_NEAR(event_probability(gilbert, builtin_event("has-edge")), 0.875, kExactTolerance);
}

// P(RD in U^{-1}(Q)) computed directly on the digraph distribution matches
// both the closed form 1-(1-p)^6 and the pushforward route.
TEST(EventProbability, LiftedHasEdgeOnDirectedGilbert) {
  for (double p : {0.1, 0.3, 0.7}) {
    const auto dist = exact_iag_distribution(EdgeProbabilityFn::constant(3, p, false));
    const double direct = event_probability(dist, lift_event(builtin_event("has-edge")));
    EXPECT_NEAR(direct, 1.0 - std::pow(1.0 - p, 6.0), kExactTolerance);
    const double mapped =
        event_probability(phi_pushforward(dist), builtin_event("has-edge"));
    EXPECT_NEAR(direct, mapped, kExactTolerance);
  }
}

TEST(EventProbability, KindMismatchRejected) {
  const auto gilbert = exact_ieg_distribution(EdgeProbabilityFn::constant(3, 0.5, true));
  EXPECT_THROW(event_probability(gilbert, lift_event(builtin_event("has-edge"))),
               std::invalid_argument);
}

TEST(EsrgOracle, SingleDrawProportionalToMass) {
  const std::vector<double> mu = {0.5, 0.25, 0.25};
  const GraphDistribution dist = esrg_exact_distribution_oracle(3, mu, 1);
  EXPECT_NEAR(dist.mass(0x1), 0.5, kExactTolerance);
  EXPECT_NEAR(dist.mass(0x2), 0.25, kExactTolerance);
  EXPECT_NEAR(dist.mass(0x4), 0.25, kExactTolerance);
}

TEST(EsrgOracle, ClassicalErUniformOverTwoEdgeGraphs) {
  const std::vector<double> uniform(3, 1.0 / 3.0);
  const GraphDistribution dist = esrg_exact_distribution_oracle(3, uniform, 2);
  EXPECT_NEAR(dist.mass(0x3), 1.0 / 3.0, kExactTolerance);
  EXPECT_NEAR(dist.mass(0x5), 1.0 / 3.0, kExactTolerance);
  EXPECT_NEAR(dist.mass(0x6), 1.0 / 3.0, kExactTolerance);
}

// mu-circ proportional to (2,1,1), m=2: the six insertion orders give
// {A,B} = {A,C} = 5/12 and {B,C} = 1/6.
TEST(EsrgOracle, HandEnumeratedTwoStepCase) {
  const std::vector<double> mu = {0.5, 0.25, 0.25};
  const GraphDistribution dist = esrg_exact_distribution_oracle(3, mu, 2);
  EXPECT_NEAR(dist.mass(0x3), 5.0 / 12.0, kExactTolerance);
  EXPECT_NEAR(dist.mass(0x5), 5.0 / 12.0, kExactTolerance);
  EXPECT_NEAR(dist.mass(0x6), 1.0 / 6.0, kExactTolerance);
  EXPECT_NEAR(dist.total_mass(), 1.0, kExactTolerance);
}

TEST(EsrgOracle, RejectsInfeasibleM) {
  const std::vector<double> mu = {1.0, 0.0, 0.0};
  EXPECT_THROW(esrg_exact_distribution_oracle(3, mu, 2), std::invalid_argument);
}

TEST(AsrgOracle, MatchesUniformTwoArcSymmetry) {
  const std::vector<double> uniform(6, 1.0 / 6.0);
  const GraphDistribution dist = asrg_exact_distribution_oracle(3, uniform, 2);
  EXPECT_NEAR(dist.total_mass(), 1.0, kExactTolerance);
  // all C(6,2)=15 two-arc digraphs are equally likely
  int states = 0;
  for (std::uint64_t code = 0; code < dist.size(); ++code) {
    if (dist.mass(code) == 0.0) continue;
    ++states;
    EXPECT_NEAR(dist.mass(code), 1.0 / 15.0, kExactTolerance);
  }
  EXPECT_EQ(states, 15);
}

TEST(SelectionOracle, TermCapEnforced) {
  const std::vector<double> uniform(15, 1.0 / 15.0);
  EXPECT_THROW(esrg_exact_distribution_oracle(6, uniform, 6, /*term_cap=*/100),
               std::domain_error);
}
