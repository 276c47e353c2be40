#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "undirectify/events.hpp"
#include "undirectify/graph.hpp"

namespace undirectify {

enum class GraphKind { graph, digraph };

inline std::string to_string(GraphKind k) {
  return k == GraphKind::graph ? "graph" : "digraph";
}

inline constexpr double kExactTolerance = 1e-12;

// Exact pmf over all (di)graphs on n vertices, dense over canonical codes.
class GraphDistribution {
 public:
  GraphDistribution(int n, GraphKind kind)
      : n_(n), kind_(kind),
        pmf_(kind == GraphKind::graph ? graph_code_count(checked(n, kind))
                                      : digraph_code_count(checked(n, kind)),
             0.0) {}

  int n() const { return n_; }
  GraphKind kind() const { return kind_; }
  std::size_t size() const { return pmf_.size(); }

  double mass(std::uint64_t code) const { return pmf_.at(code); }
  void set_mass(std::uint64_t code, double p) { pmf_.at(code) = p; }
  void add_mass(std::uint64_t code, double p) { pmf_.at(code) += p; }

  const std::vector<double>& pmf() const { return pmf_; }

  double total_mass() const {
    long double acc = 0.0L;
    for (double p : pmf_) acc += p;
    return static_cast<double>(acc);
  }

  void validate() const {
    for (double p : pmf_)
      if (p < 0.0 || !std::isfinite(p))
        throw std::domain_error("GraphDistribution: negative or non-finite mass");
    if (std::abs(total_mass() - 1.0) > kExactTolerance)
      throw std::domain_error("GraphDistribution: mass sums to " +
                              std::to_string(total_mass()));
  }

  static GraphDistribution point_mass(const Graph& g) {
    GraphDistribution d(g.vertex_count(), GraphKind::graph);
    d.set_mass(g.encode(), 1.0);
    return d;
  }

  static GraphDistribution point_mass(const Digraph& g) {
    GraphDistribution d(g.vertex_count(), GraphKind::digraph);
    d.set_mass(g.encode(), 1.0);
    return d;
  }

 private:
  static int checked(int n, GraphKind kind) {
    const int cap = kind == GraphKind::graph ? kMaxEnumerationGraphN : kMaxEnumerationDigraphN;
    if (n < 1 || n > cap)
      throw std::invalid_argument("GraphDistribution: n=" + std::to_string(n) +
                                  " exceeds exact-computation cap " + std::to_string(cap));
    return n;
  }

  int n_;
  GraphKind kind_;
  std::vector<double> pmf_;
};

// Pushforward under the forgetful map: each graph receives the summed mass of
// its preimage class. Mass is conserved exactly because preimages partition
// the digraph space.
inline GraphDistribution phi_pushforward(const GraphDistribution& d) {
  if (d.kind() != GraphKind::digraph)
    throw std::invalid_argument("phi_pushforward: input must be a digraph distribution");
  const int n = d.n();
  GraphDistribution out(n, GraphKind::graph);
  const int pairs = PairIndex::unordered_count(n);
  const std::uint64_t total = digraph_code_count(n);
  for (std::uint64_t code = 0; code < total; ++code) {
    const double p = d.mass(code);
    if (p == 0.0) continue;
    std::uint64_t gcode = 0;
    for (int u = 0; u < pairs; ++u)
      if ((code >> (2 * u)) & 3u) gcode |= std::uint64_t{1} << u;
    out.add_mass(gcode, p);
  }
  return out;
}

inline void require_comparable(const GraphDistribution& a, const GraphDistribution& b) {
  if (a.n() != b.n() || a.kind() != b.kind())
    throw std::invalid_argument("distributions differ in n or kind");
}

// Half the L1 distance between the two pmfs.
inline double tv_distance(const GraphDistribution& a, const GraphDistribution& b) {
  require_comparable(a, b);
  long double acc = 0.0L;
  for (std::size_t c = 0; c < a.size(); ++c) acc += std::abs(a.pmf()[c] - b.pmf()[c]);
  return static_cast<double>(acc / 2.0L);
}

// The maximizing event pair: Q+ = {x : a(x) > b(x)}, Q- = {x : a(x) < b(x)}.
// gap equals the total variation distance.
struct WitnessEvents {
  std::vector<std::uint64_t> q_plus;
  std::vector<std::uint64_t> q_minus;
  double gap = 0.0;
};

inline WitnessEvents witness_events(const GraphDistribution& a, const GraphDistribution& b) {
  require_comparable(a, b);
  WitnessEvents w;
  long double pa = 0.0L, pb = 0.0L;
  for (std::uint64_t c = 0; c < a.size(); ++c) {
    const double ma = a.pmf()[c], mb = b.pmf()[c];
    if (ma > mb) {
      w.q_plus.push_back(c);
      pa += ma;
      pb += mb;
    } else if (ma < mb) {
      w.q_minus.push_back(c);
    }
  }
  w.gap = static_cast<double>(std::abs(pa - pb));
  return w;
}

inline double event_probability(const GraphDistribution& dist, const EventSpec& q) {
  if (dist.kind() != GraphKind::graph)
    throw std::invalid_argument("event_probability: graph event on non-graph distribution");
  long double acc = 0.0L;
  for (std::uint64_t c = 0; c < dist.size(); ++c) {
    const double p = dist.pmf()[c];
    if (p != 0.0 && q.predicate(Graph::decode(c, dist.n()))) acc += p;
  }
  return static_cast<double>(acc);
}

inline double event_probability(const GraphDistribution& dist, const DigraphEventSpec& q) {
  if (dist.kind() != GraphKind::digraph)
    throw std::invalid_argument("event_probability: digraph event on non-digraph distribution");
  long double acc = 0.0L;
  for (std::uint64_t c = 0; c < dist.size(); ++c) {
    const double p = dist.pmf()[c];
    if (p != 0.0 && q.predicate(Digraph::decode(c, dist.n()))) acc += p;
  }
  return static_cast<double>(acc);
}

namespace detail {

// Exact pmf of "draw locations from `mass` without replacement until m are
// placed", as a sum over all ordered insertion sequences with sequential
// renormalization. Generic over the location space; the caller maps location
// indices to codes.
struct SelectionOracle {
  const std::vector<double>& mass;  // per location, nonnegative
  int m;
  long long term_cap;

  template <class Emit>
  void run(Emit&& emit) {
    std::vector<int> chosen;
    chosen.reserve(m);
    std::vector<bool> used(mass.size(), false);
    long long terms = 0;
    recurse(chosen, used, 1.0, 1.0, terms, emit);
  }

 private:
  template <class Emit>
  void recurse(std::vector<int>& chosen, std::vector<bool>& used, double prob,
               double remaining, long long& terms, Emit&& emit) {
    if (static_cast<int>(chosen.size()) == m) {
      emit(chosen, prob);
      return;
    }
    for (int loc = 0; loc < static_cast<int>(mass.size()); ++loc) {
      if (used[loc] || mass[loc] <= 0.0) continue;
      if (++terms > term_cap)
        throw std::domain_error("selection oracle: term cap exceeded");
      used[loc] = true;
      chosen.push_back(loc);
      recurse(chosen, used, prob * mass[loc] / remaining, remaining - mass[loc], terms, emit);
      chosen.pop_back();
      used[loc] = false;
    }
  }
};

}  // namespace detail

inline constexpr long long kSelectionOracleTermCap = 10'000'000;

// Exact ESRG pmf by enumerating insertion orders; independent of the sampling
// path used by the couplings it validates. `mu_unordered` is indexed by the
// unordered PairIndex of n.
inline GraphDistribution esrg_exact_distribution_oracle(
    int n, const std::vector<double>& mu_unordered, int m,
    long long term_cap = kSelectionOracleTermCap) {
  if (static_cast<int>(mu_unordered.size()) != PairIndex::unordered_count(n))
    throw std::invalid_argument("esrg oracle: mass vector size mismatch");
  int positive = 0;
  for (double x : mu_unordered)
    if (x > 0.0) ++positive;
  if (m < 0 || m > positive)
    throw std::invalid_argument("esrg oracle: m exceeds positive-mass pair count");
  GraphDistribution out(n, GraphKind::graph);
  detail::SelectionOracle oracle{mu_unordered, m, term_cap};
  oracle.run([&](const std::vector<int>& chosen, double prob) {
    std::uint64_t code = 0;
    for (int loc : chosen) code |= std::uint64_t{1} << loc;
    out.add_mass(code, prob);
  });
  return out;
}

// Ordered-pair analogue for ASRG; `mu_ordered` is indexed by the ordered
// PairIndex of n.
inline GraphDistribution asrg_exact_distribution_oracle(
    int n, const std::vector<double>& mu_ordered, int m,
    long long term_cap = kSelectionOracleTermCap) {
  if (static_cast<int>(mu_ordered.size()) != PairIndex::ordered_count(n))
    throw std::invalid_argument("asrg oracle: mass vector size mismatch");
  int positive = 0;
  for (double x : mu_ordered)
    if (x > 0.0) ++positive;
  if (m < 0 || m > positive)
    throw std::invalid_argument("asrg oracle: m exceeds positive-mass pair count");
  GraphDistribution out(n, GraphKind::digraph);
  detail::SelectionOracle oracle{mu_ordered, m, term_cap};
  oracle.run([&](const std::vector<int>& chosen, double prob) {
    std::uint64_t code = 0;
    for (int loc : chosen) {
      // ordered index -> base-4 digit bit: forward = bit 0, reverse = bit 1
      code |= std::uint64_t{1} << loc;
    }
    out.add_mass(code, prob);
  });
  return out;
}

}  // namespace undirectify
