#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "undirectify/graph.hpp"
#include "undirectify/models.hpp"
#include "undirectify/rng.hpp"

namespace undirectify {

// One joint draw of (graph, digraph) under a location coupling, with the
// error accounting needed by the verification harness.
//
// xi1 counts locations carrying an edge but no arc in either direction;
// xi2 counts locations carrying an arc but no edge. For the selection
// coupling, psi records the running error count after each placement step
// and rules records which rule fired at each step (1, 2 or 3).
struct CoupledSample {
  Graph graph;
  Digraph digraph;
  int xi1 = 0;
  int xi2 = 0;
  std::vector<int> psi;
  std::vector<int> rules;
  std::array<long, 3> rule_counts{0, 0, 0};
  bool degenerate = false;

  CoupledSample(Graph g, Digraph d) : graph(std::move(g)), digraph(std::move(d)) {}
};

// Independent recounts from the final structures; the couplings track the
// same quantities incrementally, and tests compare the two bookkeepings.
inline int recount_xi1(const Graph& g, const Digraph& d) {
  if (g.vertex_count() != d.vertex_count())
    throw std::invalid_argument("recount_xi1: vertex count mismatch");
  int count = 0;
  const int pairs = PairIndex::unordered_count(g.vertex_count());
  for (int u = 0; u < pairs; ++u)
    if (g.has_edge_at(u) && !d.has_arc_at(2 * u) && !d.has_arc_at(2 * u + 1)) ++count;
  return count;
}

inline int recount_xi2(const Graph& g, const Digraph& d) {
  if (g.vertex_count() != d.vertex_count())
    throw std::invalid_argument("recount_xi2: vertex count mismatch");
  int count = 0;
  const int pairs = PairIndex::unordered_count(g.vertex_count());
  for (int u = 0; u < pairs; ++u)
    if (!g.has_edge_at(u) && (d.has_arc_at(2 * u) || d.has_arc_at(2 * u + 1))) ++count;
  return count;
}

// Exact location coupling of IAG(pi) and IEG(pi') with
// pi'(v,w) = 1 - (1-pi(v,w))(1-pi(w,v)): draw the two arc indicators per
// location independently and set the edge iff at least one arc appears.
// Never produces a coupling error.
inline CoupledSample couple_iag_ieg_exact(const EdgeProbabilityFn& pi, Rng& rng) {
  const int n = pi.n();
  const PairIndex index(n);
  std::vector<std::pair<int, int>> edges, arcs;
  for (int u = 0; u < PairIndex::unordered_count(n); ++u) {
    auto [v, w] = index.unordered_at(u);
    const bool fwd = rng.bernoulli(pi.at_ordered(2 * u));
    const bool rev = rng.bernoulli(pi.at_ordered(2 * u + 1));
    if (fwd) arcs.emplace_back(v, w);
    if (rev) arcs.emplace_back(w, v);
    if (fwd || rev) edges.emplace_back(v, w);
  }
  return CoupledSample{Graph(n, edges), Digraph(n, arcs)};
}

// Approximate location coupling of IAG(pi) and IEG(pi-circ) with
// pi-circ(v,w) = pi(v,w) + pi(w,v), which must stay within [0,1].
//
// Per location the joint indicator law is
//   (edge=0, arcs absent)    w.p. 1 - pi-circ
//   (edge=1, arcs absent)    w.p. pi(v,w) pi(w,v)      <- the only error case
//   (edge=1, >=1 arc)        w.p. pi-circ - pi(v,w) pi(w,v)
// and in the third case the arc pattern is drawn from the law of two
// independent Bernoulli arcs conditioned on at least one success. Hence the
// digraph marginal is IAG(pi), the graph marginal is IEG(pi-circ), and
// xi2 = 0 always.
inline CoupledSample couple_iag_ieg_approx(const EdgeProbabilityFn& pi, Rng& rng) {
  const int n = pi.n();
  const PairIndex index(n);
  for (int u = 0; u < PairIndex::unordered_count(n); ++u) {
    const double circ = pi.at_ordered(2 * u) + pi.at_ordered(2 * u + 1);
    if (circ > 1.0) {
      auto [v, w] = index.unordered_at(u);
      throw std::domain_error("couple_iag_ieg_approx: pi-circ = " + std::to_string(circ) +
                              " > 1 at pair (" + std::to_string(v) + "," + std::to_string(w) +
                              ")");
    }
  }
  CoupledSample sample{Graph(n), Digraph(n)};
  std::vector<std::pair<int, int>> edges, arcs;
  int xi1 = 0;
  for (int u = 0; u < PairIndex::unordered_count(n); ++u) {
    auto [v, w] = index.unordered_at(u);
    const double a = pi.at_ordered(2 * u);
    const double b = pi.at_ordered(2 * u + 1);
    const double circ = a + b;
    const double both = a * b;
    const double x = rng.next_double();
    if (x < 1.0 - circ) continue;  // no edge, no arcs
    edges.emplace_back(v, w);
    if (x < 1.0 - circ + both) {  // edge without arcs: one xi1 error
      ++xi1;
      continue;
    }
    // arcs conditioned on at least one success
    const double prime = circ - both;  // = 1 - (1-a)(1-b)
    const double y = rng.next_double() * prime;
    if (y < a * (1.0 - b)) {
      arcs.emplace_back(v, w);
    } else if (y < a * (1.0 - b) + (1.0 - a) * b) {
      arcs.emplace_back(w, v);
    } else {
      arcs.emplace_back(v, w);
      arcs.emplace_back(w, v);
    }
  }
  sample.graph = Graph(n, edges);
  sample.digraph = Digraph(n, arcs);
  sample.xi1 = xi1;
  return sample;
}

// Approximate location coupling of ASRG(mu, m) and ESRG(mu-circ, m). The
// digraph side runs the plain selection procedure; each accepted arc (v,w)
// drives the graph side by one of three rules:
//   III  (w,v) already placed: the location is occupied, so a fresh edge is
//        drawn from mu-circ over the non-present edges. Creates one error.
//   I    the edge {v,w} already exists (placed earlier by a fresh-edge draw):
//        the arc resolves that error, and the fresh edge drawn in its stead
//        creates a new one. Net error count unchanged.
//   II   otherwise: place the edge {v,w} at the same location.
//
// If a fresh-edge draw finds every positive-mass edge already present, the
// replicate cannot continue and is flagged degenerate; callers exclude such
// replicates with a counted diagnostic.
inline CoupledSample couple_asrg_esrg(const EdgeMassFn& mu, int m, Rng& rng,
                                      long cap = kRejectionIterationCap) {
  if (mu.domain() != EdgeMassFn::Domain::ordered)
    throw std::invalid_argument("couple_asrg_esrg: mu must live on ordered pairs");
  detail::check_selection_feasible(mu, m);
  const int n = mu.n();
  const PairIndex index(n);
  const EdgeMassFn mu_circ = mu.circ();
  DiscreteSampler arc_sampler(mu.values());
  DiscreteSampler edge_sampler(mu_circ.values());

  std::vector<char> arc_present(mu.values().size(), 0);
  std::vector<char> edge_present(mu_circ.values().size(), 0);

  CoupledSample sample{Graph(n), Digraph(n)};
  sample.psi.push_back(0);

  auto fresh_edge_available = [&]() {
    for (std::size_t e = 0; e < edge_present.size(); ++e)
      if (!edge_present[e] && mu_circ.values()[e] > 0.0) return true;
    return false;
  };

  for (int step = 0; step < m; ++step) {
    const int loc = detail::draw_new_location(arc_sampler, arc_present, rng, cap);
    arc_present[loc] = 1;
    const int u = loc / 2;
    const int reverse = loc ^ 1;

    int rule;
    if (arc_present[reverse]) {
      rule = 3;
    } else if (edge_present[u]) {
      rule = 1;
    } else {
      rule = 2;
    }
    sample.rules.push_back(rule);
    ++sample.rule_counts[rule - 1];
    sample.psi.push_back(sample.psi.back() + (rule == 3 ? 1 : 0));

    if (rule == 2) {
      edge_present[u] = 1;
    } else {
      if (!fresh_edge_available()) {
        sample.degenerate = true;
        break;
      }
      const int e = detail::draw_new_location(edge_sampler, edge_present, rng, cap);
      edge_present[e] = 1;
    }
  }

  std::vector<std::pair<int, int>> edges, arcs;
  for (std::size_t e = 0; e < edge_present.size(); ++e)
    if (edge_present[e]) edges.push_back(index.unordered_at(static_cast<int>(e)));
  for (std::size_t a = 0; a < arc_present.size(); ++a)
    if (arc_present[a]) arcs.push_back(index.ordered_at(static_cast<int>(a)));
  sample.graph = Graph(n, edges);
  sample.digraph = Digraph(n, arcs);
  if (!sample.degenerate) {
    sample.xi1 = sample.psi.back();
    sample.xi2 = 0;
  }
  return sample;
}

// ---------------------------------------------------------------------------
// Error super-martingale
// ---------------------------------------------------------------------------

// M_s = (Psi_s - sum_{i<=s} a_i prod_{j=i+1..s} b_j) / prod_{i<=s} b_i with
// a_i = i/(1/mu_up - i) and b_i = 1 - 2/(1/mu_up - i).
struct MartingaleTrace {
  double mu_up = 0.0;
  std::vector<double> a;         // a_1..a_m
  std::vector<double> b;         // b_1..b_m
  std::vector<double> m_values;  // M_0..M_m
};

inline MartingaleTrace martingale_transform(const std::vector<int>& psi, double mu_up) {
  if (psi.empty()) throw std::invalid_argument("martingale_transform: empty trajectory");
  if (!(mu_up > 0.0 && mu_up <= 1.0))
    throw std::invalid_argument("martingale_transform: mu_up must lie in (0,1]");
  const int m = static_cast<int>(psi.size()) - 1;
  const double f = 1.0 / mu_up;
  if (m >= f)
    throw std::domain_error("martingale_transform: m >= 1/mu_up, formula singular");
  MartingaleTrace trace;
  trace.mu_up = mu_up;
  trace.m_values.resize(m + 1);
  trace.m_values[0] = 0.0;
  double compensator = 0.0;  // sum_{i<=s} a_i prod_{j=i+1..s} b_j
  double normalizer = 1.0;   // prod_{i<=s} b_i
  for (int s = 1; s <= m; ++s) {
    const double denom = f - s;
    const double a_s = s / denom;
    const double b_s = 1.0 - 2.0 / denom;
    if (b_s == 0.0)
      throw std::domain_error("martingale_transform: b_" + std::to_string(s) +
                              " vanishes, formula singular");
    trace.a.push_back(a_s);
    trace.b.push_back(b_s);
    compensator = b_s * compensator + a_s;
    normalizer *= b_s;
    trace.m_values[s] = (psi[s] - compensator) / normalizer;
  }
  return trace;
}

// Closed-form recomputation of M_s for consistency checks against the
// recursive evaluation above.
inline double martingale_value_closed_form(const std::vector<int>& psi, double mu_up, int s) {
  const double f = 1.0 / mu_up;
  double compensator = 0.0;
  for (int i = 1; i <= s; ++i) {
    double term = i / (f - i);
    for (int j = i + 1; j <= s; ++j) term *= 1.0 - 2.0 / (f - j);
    compensator += term;
  }
  double normalizer = 1.0;
  for (int i = 1; i <= s; ++i) normalizer *= 1.0 - 2.0 / (f - i);
  return (psi[s] - compensator) / normalizer;
}

// Exact value of sum_{s=1..m} s/(f-s) prod_{r=s+1..m} (1 - 2/(f-r)), the
// compensator growth of the error super-martingale.
inline double growth_bound(int m, double f) {
  if (m < 0) throw std::invalid_argument("growth_bound: m must be nonnegative");
  if (m == 0) return 0.0;
  if (!(f > m)) throw std::domain_error("growth_bound: requires f > m");
  long double total = 0.0L;
  for (int s = 1; s <= m; ++s) {
    long double term = static_cast<long double>(s) / (f - s);
    for (int r = s + 1; r <= m; ++r) term *= 1.0L - 2.0L / (f - r);
    total += term;
  }
  return static_cast<double>(total);
}

// Monte Carlo estimate of the terminal drift E[M_m] - M_0 for the selection
// coupling, conditioned on the realized mass function. Passes when the
// one-sided estimate stays below 3 standard errors.
struct DriftReport {
  double estimate = 0.0;
  double se = 0.0;
  bool pass = false;
  long replicates = 0;
  long degenerate = 0;
};

inline DriftReport supermartingale_drift_check(const EdgeMassFn& mu, int m, long replicates,
                                               std::uint64_t seed) {
  DriftReport report;
  report.replicates = replicates;
  if (m == 0) {
    report.pass = true;
    return report;
  }
  const double mu_up = mu.up();
  long double sum = 0.0L, sum_sq = 0.0L;
  long used = 0;
  Rng base(seed);
  for (long k = 0; k < replicates; ++k) {
    Rng rng = base.split(static_cast<std::uint64_t>(k));
    CoupledSample sample = couple_asrg_esrg(mu, m, rng);
    if (sample.degenerate) {
      ++report.degenerate;
      continue;
    }
    const MartingaleTrace trace = martingale_transform(sample.psi, mu_up);
    const double mm = trace.m_values.back();
    sum += mm;
    sum_sq += static_cast<long double>(mm) * mm;
    ++used;
  }
  if (used == 0) throw std::runtime_error("supermartingale_drift_check: no usable replicates");
  report.estimate = static_cast<double>(sum / used);
  const double var =
      std::max(0.0, static_cast<double>(sum_sq / used) - report.estimate * report.estimate);
  report.se = std::sqrt(var / used);
  report.pass = report.estimate <= 3.0 * report.se;
  return report;
}

// Spec-level wrapper, conditioned on the vertex vector realized from the seed.
inline DriftReport supermartingale_drift_check(const ModelSpec& spec, long replicates,
                                               std::uint64_t seed) {
  if (spec.model_class != ModelClass::ASRG)
    throw std::invalid_argument("supermartingale_drift_check: spec must be an ASRG model");
  Rng rng = Rng(seed).split(0xFEED);
  const auto realized = realize_selection(spec, rng);
  return supermartingale_drift_check(realized.mu, realized.m, replicates, seed);
}

}  // namespace undirectify
