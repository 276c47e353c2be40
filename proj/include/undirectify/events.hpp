#pragma once

#include <functional>
#include <string>
#include <vector>

#include "undirectify/graph.hpp"

namespace undirectify {

enum class Monotonicity { increasing, decreasing, none };

inline std::string to_string(Monotonicity m) {
  switch (m) {
    case Monotonicity::increasing: return "increasing";
    case Monotonicity::decreasing: return "decreasing";
    case Monotonicity::none: return "none";
  }
  return "none";
}

// A decidable graph predicate with a declared (not inferred) monotonicity tag.
struct EventSpec {
  std::string name;
  Monotonicity monotonicity = Monotonicity::none;
  std::function<bool(const Graph&)> predicate;
};

struct DigraphEventSpec {
  std::string name;
  Monotonicity monotonicity = Monotonicity::none;
  std::function<bool(const Digraph&)> predicate;
};

// U^{-1}(Q): evaluate the graph event on the underlying undirected graph.
// Monotonicity carries over because arc-subset implies edge-subset of the images.
inline DigraphEventSpec lift_event(const EventSpec& q) {
  return DigraphEventSpec{
      "lifted:" + q.name, q.monotonicity,
      [pred = q.predicate](const Digraph& d) { return pred(forgetful_map(d)); }};
}

namespace events {

inline bool contains_triangle(const Graph& g) {
  const int n = g.vertex_count();
  for (int a = 1; a <= n; ++a)
    for (int b = a + 1; b <= n; ++b) {
      if (!g.has_edge(a, b)) continue;
      for (int c = b + 1; c <= n; ++c)
        if (g.has_edge(a, c) && g.has_edge(b, c)) return true;
    }
  return false;
}

inline bool is_connected(const Graph& g) {
  const int n = g.vertex_count();
  if (n == 1) return true;
  std::vector<bool> seen(n + 1, false);
  std::vector<int> stack{1};
  seen[1] = true;
  int visited = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w = 1; w <= n; ++w) {
      if (w == v || seen[w] || !g.has_edge(v, w)) continue;
      seen[w] = true;
      ++visited;
      stack.push_back(w);
    }
  }
  return visited == n;
}

inline int max_degree(const Graph& g) {
  const int n = g.vertex_count();
  int best = 0;
  for (int v = 1; v <= n; ++v) {
    int deg = 0;
    for (int w = 1; w <= n; ++w)
      if (w != v && g.has_edge(v, w)) ++deg;
    best = std::max(best, deg);
  }
  return best;
}

}  // namespace events

// Catalog used by the verification suites; tags are declared and spot-checked
// by property tests.
inline const std::vector<EventSpec>& builtin_events() {
  static const std::vector<EventSpec> catalog = {
      {"always-true", Monotonicity::increasing, [](const Graph&) { return true; }},
      {"has-edge", Monotonicity::increasing,
       [](const Graph& g) { return g.edge_count() >= 1; }},
      {"empty", Monotonicity::decreasing,
       [](const Graph& g) { return g.edge_count() == 0; }},
      {"triangle", Monotonicity::increasing, events::contains_triangle},
      {"connected", Monotonicity::increasing, events::is_connected},
      {"max-degree-ge-3", Monotonicity::increasing,
       [](const Graph& g) { return events::max_degree(g) >= 3; }},
      {"edge-count-even", Monotonicity::none,
       [](const Graph& g) { return g.edge_count() % 2 == 0; }},
      {"edge-count-ge-2", Monotonicity::increasing,
       [](const Graph& g) { return g.edge_count() >= 2; }},
  };
  return catalog;
}

inline const EventSpec& builtin_event(const std::string& name) {
  for (const auto& e : builtin_events())
    if (e.name == name) return e;
  throw std::invalid_argument("unknown built-in event: " + name);
}

}  // namespace undirectify
