#include <gtest/gtest.h>

#include <map>
#include <set>

#include "undirectify/events.hpp"
#include "undirectify/graph.hpp"
#include "undirectify/rng.hpp"

using namespace undirectify;

namespace {

Graph random_graph(int n, double density, Rng& rng) {
  std::vector<std::pair<int, int>> edges;
  const PairIndex index(n);
  for (int u = 0; u < PairIndex::unordered_count(n); ++u)
    if (rng.bernoulli(density)) edges.push_back(index.unordered_at(u));
  return Graph(n, edges);
}

Digraph random_digraph(int n, double density, Rng& rng) {
  std::vector<std::pair<int, int>> arcs;
  const PairIndex index(n);
  for (int i = 0; i < PairIndex::ordered_count(n); ++i)
    if (rng.bernoulli(density)) arcs.push_back(index.ordered_at(i));
  return Digraph(n, arcs);
}

}  // namespace

TEST(PairIndex, LexicographicAndBijective) {
  for (int n = 2; n <= 8; ++n) {
    const PairIndex index(n);
    int expected = 0;
    for (int v = 1; v <= n; ++v)
      for (int w = v + 1; w <= n; ++w) {
        EXPECT_EQ(index.unordered(v, w), expected);
        EXPECT_EQ(index.unordered(w, v), expected);
        EXPECT_EQ(index.unordered_at(expected), (std::pair{v, w}));
        EXPECT_EQ(index.ordered(v, w), 2 * expected);
        EXPECT_EQ(index.ordered(w, v), 2 * expected + 1);
        EXPECT_EQ(index.ordered_at(2 * expected), (std::pair{v, w}));
        EXPECT_EQ(index.ordered_at(2 * expected + 1), (std::pair{w, v}));
        ++expected;
      }
    EXPECT_EQ(expected, PairIndex::unordered_count(n));
  }
}

TEST(PairIndex, RejectsSelfLoopsAndOutOfRange) {
  const PairIndex index(4);
  EXPECT_THROW(index.unordered(2, 2), std::invalid_argument);
  EXPECT_THROW(index.unordered(0, 1), std::invalid_argument);
  EXPECT_THROW(index.unordered(1, 5), std::invalid_argument);
}

TEST(Graph, RejectsSelfLoopsAndDuplicates) {
  EXPECT_THROW(Graph(3, {{1, 1}}), std::invalid_argument);
  EXPECT_THROW(Graph(3, {{1, 2}, {2, 1}}), std::invalid_argument);
  EXPECT_THROW(Digraph(3, {{2, 2}}), std::invalid_argument);
  EXPECT_THROW(Digraph(3, {{1, 2}, {1, 2}}), std::invalid_argument);
  // both directions form a bidirectional arc, which is allowed
  EXPECT_NO_THROW(Digraph(3, {{1, 2}, {2, 1}}));
}

TEST(Graph, EncodeDecodeRoundTrip) {
  Rng rng(101);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(7));
    const Graph g = random_graph(n, rng.next_double(), rng);
    EXPECT_EQ(Graph::decode(g.encode(), n), g);
    const Digraph d = random_digraph(n, rng.next_double(), rng);
    EXPECT_EQ(Digraph::decode(d.encode(), n), d);
  }
}

TEST(Graph, DecodeRejectsOutOfRangeCodes) {
  EXPECT_THROW(Graph::decode(1u << 3, 3), std::invalid_argument);
  EXPECT_THROW(Digraph::decode(std::uint64_t{1} << 7, 3), std::invalid_argument);
}

TEST(ForgetfulMap, SpecExamples) {
  EXPECT_EQ(forgetful_map(Digraph(3, {{1, 2}, {2, 1}, {3, 1}})),
            Graph(3, {{1, 2}, {1, 3}}));
  EXPECT_EQ(forgetful_map(Digraph(4, {})), Graph(4, {}));
  EXPECT_EQ(forgetful_map(Digraph(2, {{2, 1}})), Graph(2, {{1, 2}}));
}

TEST(ForgetfulMap, PreimageSizeExamples) {
  EXPECT_EQ(forgetful_preimage_size(Graph(4, {})), 1u);
  EXPECT_EQ(forgetful_preimage_size(Graph(3, {{1, 2}, {2, 3}})), 9u);
  EXPECT_EQ(forgetful_preimage_size(
                Graph(4, {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}})),
            729u);
}

TEST(ForgetfulMap, PreimageSizeOverflowGuard) {
  std::vector<std::pair<int, int>> edges;
  for (int v = 1; v <= 10; ++v)
    for (int w = v + 1; w <= 10; ++w) edges.emplace_back(v, w);
  const Graph k10(10, edges);  // 45 edges: 3^45 does not fit in 64 bits
  EXPECT_THROW(forgetful_preimage_size(k10), std::domain_error);
}

// Exhaustive check of surjectivity, disjoint preimage classes, and the 3^|E|
// preimage count at n <= 4.
TEST(ForgetfulMap, PreimagePartitionExhaustive) {
  for (int n = 2; n <= 4; ++n) {
    std::map<std::uint64_t, std::uint64_t> preimage_counts;
    std::uint64_t total = 0;
    enumerate_digraphs(n, [&](const Digraph& d) {
      ++preimage_counts[forgetful_map(d).encode()];
      ++total;
    });
    EXPECT_EQ(total, digraph_code_count(n));
    std::uint64_t graphs_seen = 0;
    std::uint64_t sum = 0;
    enumerate_graphs(n, [&](const Graph& g) {
      ++graphs_seen;
      const auto it = preimage_counts.find(g.encode());
      ASSERT_NE(it, preimage_counts.end()) << "graph without preimage";
      EXPECT_EQ(it->second, forgetful_preimage_size(g));
      sum += it->second;
    });
    EXPECT_EQ(graphs_seen, graph_code_count(n));
    EXPECT_EQ(sum, digraph_code_count(n));  // classes partition the digraphs
  }
}

TEST(Enumeration, CountsAndRefusal) {
  long graphs2 = 0, graphs3 = 0, graphs4 = 0;
  enumerate_graphs(2, [&](const Graph&) { ++graphs2; });
  enumerate_graphs(3, [&](const Graph&) { ++graphs3; });
  enumerate_graphs(4, [&](const Graph&) { ++graphs4; });
  EXPECT_EQ(graphs2, 2);
  EXPECT_EQ(graphs3, 8);
  EXPECT_EQ(graphs4, 64);
  long digraphs2 = 0, digraphs3 = 0, digraphs4 = 0;
  enumerate_digraphs(2, [&](const Digraph&) { ++digraphs2; });
  enumerate_digraphs(3, [&](const Digraph&) { ++digraphs3; });
  enumerate_digraphs(4, [&](const Digraph&) { ++digraphs4; });
  EXPECT_EQ(digraphs2, 4);
  EXPECT_EQ(digraphs3, 64);
  EXPECT_EQ(digraphs4, 4096);

  try {
    enumerate_graphs(9, [](const Graph&) {});
    FAIL() << "expected refusal";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("2^C(n,2)"), std::string::npos);
  }
  EXPECT_THROW(enumerate_digraphs(6, [](const Digraph&) {}), std::invalid_argument);
}

TEST(Perturb, ExamplesAndReversibility) {
  EXPECT_EQ(perturb_graph(Graph(3, {}), {{1, 2}}, {}), Graph(3, {{1, 2}}));
  const Graph k3(3, {{1, 2}, {1, 3}, {2, 3}});
  EXPECT_EQ(perturb_graph(k3, {}, {{1, 2}}), Graph(3, {{1, 3}, {2, 3}}));
  EXPECT_EQ(perturb_graph(k3, {}, {}), k3);

  EXPECT_THROW(perturb_graph(k3, {{1, 2}}, {}), std::invalid_argument);
  EXPECT_THROW(perturb_graph(Graph(3, {}), {}, {{1, 2}}), std::invalid_argument);

  Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(4));
    const Graph g = random_graph(n, 0.5, rng);
    std::vector<std::pair<int, int>> add, remove;
    const PairIndex index(n);
    for (int u = 0; u < PairIndex::unordered_count(n); ++u) {
      if (g.has_edge_at(u)) {
        if (rng.bernoulli(0.3)) remove.push_back(index.unordered_at(u));
      } else if (rng.bernoulli(0.3)) {
        add.push_back(index.unordered_at(u));
      }
    }
    const Graph perturbed = perturb_graph(g, add, remove);
    EXPECT_EQ(perturb_graph(perturbed, remove, add), g);
  }
}

TEST(Events, PredicateBasics) {
  const Graph triangle(4, {{1, 2}, {2, 3}, {1, 3}});
  EXPECT_TRUE(events::contains_triangle(triangle));
  EXPECT_FALSE(events::contains_triangle(Graph(4, {{1, 2}, {2, 3}, {3, 4}})));
  EXPECT_TRUE(events::is_connected(Graph(3, {{1, 2}, {2, 3}})));
  EXPECT_FALSE(events::is_connected(Graph(3, {{1, 2}})));
  EXPECT_TRUE(events::is_connected(Graph(1, {})));
  EXPECT_EQ(events::max_degree(Graph(4, {{1, 2}, {1, 3}, {1, 4}})), 3);
}

TEST(Events, LiftExamples) {
  const auto& has_edge = builtin_event("has-edge");
  EXPECT_TRUE(lift_event(has_edge).predicate(Digraph(3, {{1, 2}})));

  const auto& triangle = builtin_event("triangle");
  EXPECT_TRUE(lift_event(triangle).predicate(Digraph(3, {{1, 2}, {2, 3}, {3, 1}})));

  const auto& two_edges = builtin_event("edge-count-ge-2");
  EXPECT_FALSE(lift_event(two_edges).predicate(Digraph(3, {{1, 2}, {2, 1}})));

  EXPECT_EQ(lift_event(triangle).monotonicity, Monotonicity::increasing);
}

// Declared monotonicity tags are spot-checked on random subset pairs, both
// for the graph events themselves and for their lifted versions.
TEST(Events, DeclaredTagsSurviveSubsetPairs) {
  Rng rng(909);
  for (const auto& event : builtin_events()) {
    if (event.monotonicity == Monotonicity::none) continue;
    for (int trial = 0; trial < 1000; ++trial) {
      Rng local = rng.split(trial * 31 + event.name.size());
      const int n = 2 + static_cast<int>(local.below(5));
      const Graph big = random_graph(n, local.next_double(), local);
      std::vector<std::pair<int, int>> kept;
      for (auto e : big.edges())
        if (local.bernoulli(0.5)) kept.push_back(e);
      const Graph small(n, kept);
      ASSERT_TRUE(small.is_subgraph_of(big));
      const bool q_small = event.predicate(small);
      const bool q_big = event.predicate(big);
      if (event.monotonicity == Monotonicity::increasing)
        EXPECT_FALSE(q_small && !q_big) << event.name;
      else
        EXPECT_FALSE(q_big && !q_small) << event.name;
    }
  }
}

TEST(Events, LiftedIncreasingNeverFlipsOnArcSubsets) {
  const DigraphEventSpec lifted = lift_event(builtin_event("has-edge"));
  Rng rng(910);
  for (int trial = 0; trial < 1000; ++trial) {
    Rng local = rng.split(trial);
    const int n = 2 + static_cast<int>(local.below(5));
    const Digraph big = random_digraph(n, local.next_double(), local);
    std::vector<std::pair<int, int>> kept;
    for (auto a : big.arcs())
      if (local.bernoulli(0.5)) kept.push_back(a);
    const Digraph small(n, kept);
    ASSERT_TRUE(small.is_subgraph_of(big));
    EXPECT_FALSE(lifted.predicate(small) && !lifted.predicate(big));
  }
}
