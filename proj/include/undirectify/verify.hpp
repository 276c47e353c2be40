#pragma once

#include <cinttypes>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "undirectify/coupling.hpp"
#include "undirectify/events.hpp"
#include "undirectify/exact.hpp"
#include "undirectify/models.hpp"
#include "undirectify/montecarlo.hpp"

namespace undirectify {

struct SuiteCheck {
  std::string name;
  bool pass = true;
  bool informational = false;
  double value = 0.0;
  double bound = 0.0;
  std::string detail;
};

struct SuiteResult {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<SuiteCheck> checks;

  bool all_hard_pass() const {
    for (const auto& c : checks)
      if (!c.informational && !c.pass) return false;
    return true;
  }
  long hard_failures() const {
    long count = 0;
    for (const auto& c : checks)
      if (!c.informational && !c.pass) ++count;
    return count;
  }
};

inline std::string canonical_string(const SuiteResult& result) {
  std::string out = result.suite + " seed=" + std::to_string(result.seed) + "\n";
  char buffer[256];
  for (const auto& c : result.checks) {
    std::snprintf(buffer, sizeof(buffer), "%s|%d|%d|%.17g|%.17g|%s\n", c.name.c_str(),
                  c.pass ? 1 : 0, c.informational ? 1 : 0, c.value, c.bound, c.detail.c_str());
    out += buffer;
  }
  return out;
}

namespace criteria {

namespace detail {

inline SuiteCheck bounded(const std::string& name, double value, double bound,
                          std::string extra = {}) {
  SuiteCheck check;
  check.name = name;
  check.value = value;
  check.bound = bound;
  check.pass = value <= bound;
  check.detail = std::move(extra);
  return check;
}

inline EdgeProbabilityFn random_ordered_pi(int n, Rng& rng) {
  std::vector<double> values(PairIndex::ordered_count(n));
  for (double& v : values) v = rng.next_double();
  return EdgeProbabilityFn(n, std::move(values), false);
}

inline GraphDistribution random_pmf(int n, GraphKind kind, Rng& rng) {
  GraphDistribution dist(n, kind);
  long double total = 0.0L;
  std::vector<double> raw(dist.size());
  for (double& x : raw) {
    x = -std::log(1.0 - rng.next_double());  // Dirichlet(1,...,1) via exponentials
    total += x;
  }
  for (std::uint64_t c = 0; c < dist.size(); ++c)
    dist.set_mass(c, static_cast<double>(raw[c] / total));
  return dist;
}

inline std::vector<EdgeProbabilityFn> criterion2_instances(std::uint64_t seed) {
  Rng rng = Rng(seed).split(0xC2);
  std::vector<EdgeProbabilityFn> instances;
  for (int i = 0; i < 20; ++i) {
    Rng local = rng.split(i);
    instances.push_back(random_ordered_pi(i % 2 == 0 ? 3 : 4, local));
  }
  return instances;
}

// fixed non-uniform ordered mass on n=3 used by the marginal checks
inline EdgeMassFn criterion7_mass() {
  std::vector<double> values = {2.0, 1.0, 1.0, 1.0, 0.5, 0.5};
  double total = 0.0;
  for (double v : values) total += v;
  for (double& v : values) v /= total;
  return EdgeMassFn(3, EdgeMassFn::Domain::ordered, std::move(values));
}

inline CciParameters random_cci_parameters(Rng& rng) {
  CciParameters params;
  params.tau = 1 + static_cast<int>(rng.below(4));
  params.l = 1 + static_cast<int>(rng.below(4));
  params.r = 1 + static_cast<int>(rng.below(4));
  params.alpha = 0.25 + 2.75 * rng.next_double();
  params.q.resize(params.tau);
  double qs = 0.0;
  for (double& x : params.q) {
    x = 0.05 + rng.next_double();  // keep q_down away from zero
    qs += x;
  }
  for (double& x : params.q) x /= qs;
  params.p.assign(params.l, std::vector<double>(params.r));
  double ps = 0.0;
  for (auto& row : params.p)
    for (double& x : row) {
      x = rng.next_double();
      ps += x;
    }
  for (auto& row : params.p)
    for (double& x : row) x /= ps;
  // every channel column must be supported by at least one type
  params.I.assign(params.tau, std::vector<int>(params.l, 0));
  params.J.assign(params.tau, std::vector<int>(params.r, 0));
  for (int i = 0; i < params.l; ++i) {
    for (int k = 0; k < params.tau; ++k) params.I[k][i] = rng.bernoulli(0.5) ? 1 : 0;
    params.I[rng.below(params.tau)][i] = 1;
  }
  for (int j = 0; j < params.r; ++j) {
    for (int k = 0; k < params.tau; ++k) params.J[k][j] = rng.bernoulli(0.5) ? 1 : 0;
    params.J[rng.below(params.tau)][j] = 1;
  }
  params.validate();
  return params;
}

}  // namespace detail

// Criterion 1: pushforward of the directed Gilbert model equals the Gilbert
// model with parameter 1 - (1-p)^2, exactly.
inline std::vector<SuiteCheck> gilbert_identity(std::uint64_t seed) {
  std::vector<SuiteCheck> checks;
  for (int n : {2, 3, 4}) {
    for (double p : {0.0, 0.1, 0.3, 0.5, 0.9, 1.0}) {
      const auto directed = EdgeProbabilityFn::constant(n, p, false);
      const GraphDistribution push = phi_pushforward(exact_iag_distribution(directed));
      const double p_prime = 1.0 - (1.0 - p) * (1.0 - p);
      const GraphDistribution gilbert =
          exact_ieg_distribution(EdgeProbabilityFn::constant(n, p_prime, true));
      const double tv = tv_distance(push, gilbert);
      checks.push_back(detail::bounded(
          "gilbert-identity n=" + std::to_string(n) + " p=" + std::to_string(p), tv,
          kExactTolerance));
      checks.push_back(detail::bounded(
          "pushforward-mass n=" + std::to_string(n) + " p=" + std::to_string(p),
          std::abs(push.total_mass() - 1.0), kExactTolerance));
    }
  }
  (void)seed;
  return checks;
}

// Criterion 2: for random conditioned instances, the pushforward of IAG(pi)
// equals IEG(pi') with pi' = 1-(1-pi(v,w))(1-pi(w,v)); the exact coupling
// never produces an error.
inline std::vector<SuiteCheck> exact_iag_ieg(std::uint64_t seed) {
  std::vector<SuiteCheck> checks;
  const auto instances = detail::criterion2_instances(seed);
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& pi = instances[i];
    const GraphDistribution push = phi_pushforward(exact_iag_distribution(pi));
    const GraphDistribution ieg = exact_ieg_distribution(pi.prime());
    checks.push_back(detail::bounded("exact-iag-ieg tv instance=" + std::to_string(i),
                                     tv_distance(push, ieg), kExactTolerance));
  }
  // 1e5 coupled replicates spread across the instances; xi recounted from the
  // final structures must be zero every time
  const long per_instance = 100'000 / static_cast<long>(instances.size());
  long violations = 0;
  Rng base = Rng(seed).split(0xC2C0);
  for (std::size_t i = 0; i < instances.size(); ++i) {
    for (long k = 0; k < per_instance; ++k) {
      Rng rng = base.split(i * per_instance + k);
      const CoupledSample sample = couple_iag_ieg_exact(instances[i], rng);
      if (sample.xi1 != 0 || sample.xi2 != 0 ||
          recount_xi1(sample.graph, sample.digraph) != 0 ||
          recount_xi2(sample.graph, sample.digraph) != 0)
        ++violations;
    }
  }
  SuiteCheck coupled;
  coupled.name = "exact-coupling xi=0 over 1e5 replicates";
  coupled.value = static_cast<double>(violations);
  coupled.bound = 0.0;
  coupled.pass = violations == 0;
  checks.push_back(coupled);
  return checks;
}

// Criterion 3: P(RD in U^{-1}(Q)) equals P(Phi(RD) in Q) for the built-in
// events and the exact distributions of criteria 1 and 2.
inline std::vector<SuiteCheck> event_transfer(std::uint64_t seed) {
  std::vector<SuiteCheck> checks;
  std::vector<std::pair<std::string, GraphDistribution>> dists;
  for (int n : {2, 3, 4})
    for (double p : {0.3, 0.5})
      dists.emplace_back("dgil n=" + std::to_string(n) + " p=" + std::to_string(p),
                         exact_iag_distribution(EdgeProbabilityFn::constant(n, p, false)));
  const auto instances = detail::criterion2_instances(seed);
  for (std::size_t i = 0; i < instances.size(); i += 5)
    dists.emplace_back("random-iag instance=" + std::to_string(i),
                       exact_iag_distribution(instances[i]));

  for (const auto& [label, dist] : dists) {
    const GraphDistribution push = phi_pushforward(dist);
    double worst = 0.0;
    for (const auto& event : builtin_events()) {
      const double direct = event_probability(dist, lift_event(event));
      const double mapped = event_probability(push, event);
      worst = std::max(worst, std::abs(direct - mapped));
    }
    checks.push_back(
        detail::bounded("event-transfer 8 events " + label, worst, kExactTolerance));
  }
  return checks;
}

// Criterion 4: the witness event construction attains the total variation
// distance exactly.
inline std::vector<SuiteCheck> witness_identity(std::uint64_t seed) {
  std::vector<SuiteCheck> checks;
  Rng rng = Rng(seed).split(0xC4);
  double worst_graph = 0.0, worst_digraph = 0.0;
  for (int i = 0; i < 100; ++i) {
    Rng local = rng.split(i);
    const GraphDistribution a = detail::random_pmf(3, GraphKind::graph, local);
    const GraphDistribution b = detail::random_pmf(3, GraphKind::graph, local);
    const WitnessEvents w = witness_events(a, b);
    worst_graph = std::max(worst_graph, std::abs(w.gap - tv_distance(a, b)));
  }
  for (int i = 0; i < 20; ++i) {
    Rng local = rng.split(1000 + i);
    const GraphDistribution a = detail::random_pmf(3, GraphKind::digraph, local);
    const GraphDistribution b = detail::random_pmf(3, GraphKind::digraph, local);
    const WitnessEvents w = witness_events(a, b);
    worst_digraph = std::max(worst_digraph, std::abs(w.gap - tv_distance(a, b)));
  }
  checks.push_back(detail::bounded("witness-gap equals tv, 100 graph pairs n=3", worst_graph,
                                   kExactTolerance));
  checks.push_back(detail::bounded("witness-gap equals tv, 20 digraph pairs n=3", worst_digraph,
                                   kExactTolerance));
  return checks;
}

// Criterion 5: approximate coupling error law at n=10, pi = 0.05.
inline std::vector<SuiteCheck> approx_error_law(std::uint64_t seed) {
  std::vector<SuiteCheck> checks;
  const int n = 10;
  const double p = 0.05;
  const auto pi = EdgeProbabilityFn::constant(n, p, false);
  const long replicates = 100'000;
  const ApproxCouplingStudy study =
      run_approx_coupling_study(pi, replicates, Rng(seed).split(0xC5).seed(), {}, true);

  const double exact_mean = study.exact_mean_xi;  // sum of pi(v,w) pi(w,v)
  const double mean = study.xi.mean();
  const double se = study.xi.se();
  checks.push_back(detail::bounded("approx mean-xi vs exact within 3se",
                                   std::abs(mean - exact_mean), 3.0 * se,
                                   "mean=" + std::to_string(mean) +
                                       " exact=" + std::to_string(exact_mean)));
  checks.push_back(detail::bounded("approx mean-xi <= (n pi_up)^2", mean,
                                   std::pow(n * study.pi_up, 2.0)));
  checks.push_back(detail::bounded("approx xi2 = 0 in every replicate",
                                   static_cast<double>(study.xi2_violations), 0.0));
  checks.push_back(detail::bounded("approx xi recount matches tracked counters",
                                   static_cast<double>(study.recount_mismatches), 0.0));
  return checks;
}

// Criterion 6: Chernoff event frequency at omega in {1,5}, 1e6 replicates.
inline std::vector<SuiteCheck> chernoff_event(std::uint64_t seed) {
  std::vector<SuiteCheck> checks;
  const auto pi = EdgeProbabilityFn::constant(10, 0.05, false);
  const auto verdicts = chernoff_xi_check(pi, {1.0, 5.0}, 1'000'000, Rng(seed).split(0xC6).seed());
  for (const auto& v : verdicts) {
    checks.push_back(detail::bounded(v.statistic, v.estimate, v.bound + v.slack,
                                     "bound=" + std::to_string(v.bound) +
                                         " slack=" + std::to_string(v.slack)));
  }
  return checks;
}

// Criterion 7: coupled marginals match the exact selection oracles at n=3,
// m=2 (chi-square p > 0.001 on both sides).
inline std::vector<SuiteCheck> asrg_esrg_marginals(std::uint64_t seed) {
  std::vector<SuiteCheck> checks;
  const EdgeMassFn mu = detail::criterion7_mass();
  const int m = 2;
  const long replicates = 200'000;
  AsrgStudyOptions options;
  options.collect_codes = true;
  options.track_martingale = false;
  const AsrgCouplingStudy study =
      run_asrg_coupling_study(mu, m, replicates, Rng(seed).split(0xC7).seed(), options);

  const GraphDistribution graph_oracle =
      esrg_exact_distribution_oracle(3, mu.circ().values(), m);
  const GraphDistribution digraph_oracle = asrg_exact_distribution_oracle(3, mu.values(), m);
  const long usable = replicates - study.degenerate;
  const ChiSquareResult graph_fit = chi_square_gof(study.graph_counts, graph_oracle, usable);
  const ChiSquareResult digraph_fit = chi_square_gof(study.digraph_counts, digraph_oracle, usable);

  SuiteCheck g;
  g.name = "coupled graph-side marginal chi-square p > 0.001";
  g.value = graph_fit.pvalue;
  g.bound = 0.001;
  g.pass = graph_fit.pvalue > 0.001;
  g.detail = "stat=" + std::to_string(graph_fit.stat) + " dof=" + std::to_string(graph_fit.dof);
  checks.push_back(g);
  SuiteCheck d;
  d.name = "coupled digraph-side marginal chi-square p > 0.001";
  d.value = digraph_fit.pvalue;
  d.bound = 0.001;
  d.pass = digraph_fit.pvalue > 0.001;
  d.detail = "stat=" + std::to_string(digraph_fit.stat) + " dof=" + std::to_string(digraph_fit.dof);
  checks.push_back(d);
  checks.push_back(detail::bounded("coupled xi recount matches tracked counters",
                                   static_cast<double>(study.recount_mismatches), 0.0));
  return checks;
}

namespace detail {

inline AsrgCouplingStudy uniform_asrg_study(std::uint64_t seed, std::vector<double> thresholds,
                                            bool track_martingale) {
  const EdgeMassFn mu = EdgeMassFn::uniform(10, EdgeMassFn::Domain::ordered);
  AsrgStudyOptions options;
  options.tail_thresholds = std::move(thresholds);
  options.track_martingale = track_martingale;
  return run_asrg_coupling_study(mu, 5, 100'000, seed, options);
}

}  // namespace detail

// Criterion 8: Psi increments are rule-III indicators, and the conditional
// increment frequency respects (s - 2 Psi_s) / (1/mu_up - s) cell by cell.
inline std::vector<SuiteCheck> psi_increment_law(std::uint64_t seed) {
  std::vector<SuiteCheck> checks;
  const AsrgCouplingStudy study =
      detail::uniform_asrg_study(Rng(seed).split(0xC8).seed(), {}, false);
  checks.push_back(detail::bounded("psi increments equal rule-III indicators",
                                   static_cast<double>(study.increment_rule_mismatches), 0.0));
  const double f = 1.0 / study.mu_up;
  long cells_checked = 0;
  for (const auto& [key, cell] : study.cells) {
    const auto [s, k] = key;
    if (cell.first < 500) continue;
    ++cells_checked;
    const double bound = (s - 2.0 * k) / (f - s);
    const double freq = static_cast<double>(cell.second) / cell.first;
    const double slack = wald_slack(bound, cell.first);
    checks.push_back(detail::bounded("conditional increment cell s=" + std::to_string(s) +
                                         " psi=" + std::to_string(k),
                                     freq, bound + slack,
                                     "obs=" + std::to_string(cell.first)));
  }
  SuiteCheck counted;
  counted.name = "conditional increment cells with >= 500 observations";
  counted.value = static_cast<double>(cells_checked);
  counted.bound = 1.0;
  counted.pass = cells_checked >= 1;
  checks.push_back(counted);
  return checks;
}

// Criterion 9: tail bound P(Psi_m >= 1/r + m^2 mu_up) <= r m^2 mu_up at
// uniform mu, n=10, m=5, r in {1,2}.
inline std::vector<SuiteCheck> psi_tail_bound(std::uint64_t seed) {
  std::vector<SuiteCheck> checks;
  const EdgeMassFn mu = EdgeMassFn::uniform(10, EdgeMassFn::Domain::ordered);
  const auto verdicts = psi_tail_check(mu, 5, {1.0, 2.0}, 100'000, Rng(seed).split(0xC9).seed());
  for (const auto& v : verdicts)
    checks.push_back(detail::bounded(v.statistic, v.estimate, v.bound + v.slack,
                                     "bound=" + std::to_string(v.bound)));
  return checks;
}

// Criterion 10: terminal drift of the error super-martingale is nonpositive
// within Monte Carlo resolution, and the transform recomputes consistently.
inline std::vector<SuiteCheck> supermartingale_drift(std::uint64_t seed) {
  std::vector<SuiteCheck> checks;
  const EdgeMassFn mu = EdgeMassFn::uniform(10, EdgeMassFn::Domain::ordered);
  const DriftReport drift =
      supermartingale_drift_check(mu, 5, 100'000, Rng(seed).split(0xCA).seed());
  checks.push_back(detail::bounded("terminal drift E[M_m] <= 3 se", drift.estimate,
                                   3.0 * drift.se,
                                   "se=" + std::to_string(drift.se)));

  // recompute consistency on random monotone trajectories
  Rng rng = Rng(seed).split(0xCA01);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    Rng local = rng.split(trial);
    const int m = 1 + static_cast<int>(local.below(12));
    const double mu_up = 0.001 + 0.02 * local.next_double();
    std::vector<int> psi{0};
    for (int s = 1; s <= m; ++s)
      psi.push_back(psi.back() + (local.bernoulli(0.3) && 2 * psi.back() < s ? 1 : 0));
    const MartingaleTrace trace = martingale_transform(psi, mu_up);
    for (int s = 0; s <= m; ++s)
      worst = std::max(worst,
                       std::abs(trace.m_values[s] - martingale_value_closed_form(psi, mu_up, s)));
  }
  checks.push_back(
      detail::bounded("martingale recursive vs closed form agreement", worst, 1e-9));
  return checks;
}

// Criterion 11: growth-bound grid, asserted in the literal form of the
// statement it verifies; the finite-size versions with provable constants
// are covered by the unit suite.
inline std::vector<SuiteCheck> growth_bound_grid(std::uint64_t seed) {
  (void)seed;
  std::vector<SuiteCheck> checks;
  for (int m = 1; m <= 20; ++m) {
    for (double f : {2.0 * m + 1.0, 10.0 * m, 100.0 * m}) {
      const double sum = growth_bound(m, f);
      checks.push_back(detail::bounded("growth-sum <= m^2/(2(f-m)) m=" + std::to_string(m) +
                                           " f=" + std::to_string(f),
                                       sum, m * m / (2.0 * (f - m))));
      if (f - m >= f / 2.0)
        checks.push_back(detail::bounded("growth-sum <= m^2/f m=" + std::to_string(m) +
                                             " f=" + std::to_string(f),
                                         sum, static_cast<double>(m) * m / f));
    }
  }
  return checks;
}

// Criterion 12: CCI kernel and mass bounds over random valid parameter sets.
inline std::vector<SuiteCheck> cci_bounds(std::uint64_t seed) {
  std::vector<SuiteCheck> checks;
  Rng base = Rng(seed).split(0xCC);
  const int n = 100;
  const long realizations = 10'000;

  long kernel_violations = 0;
  long mass_implication_violations = 0;   // freq(mu_up > 1/(n^2 q_down^2)) > freq(not A)
  long chebyshev_violations = 0;          // freq(not A) > lr * 4(1-q)/(n q) + 3se
  double worst_kernel_excess = 0.0;

  for (int trial = 0; trial < 100; ++trial) {
    Rng rng = base.split(trial);
    const CciParameters params = detail::random_cci_parameters(rng);
    const auto kernel = cci_kernel(params);
    const double kernel_bound = params.alpha / (params.lambda_down() * params.rho_down());
    for (const auto& row : kernel)
      for (double kappa : row) {
        if (kappa > kernel_bound * (1.0 + 1e-12)) ++kernel_violations;
        worst_kernel_excess = std::max(worst_kernel_excess, kappa - kernel_bound);
      }

    const double q_down = params.q_down();
    const double mu_threshold = 1.0 / (n * static_cast<double>(n) * q_down * q_down);
    long bad_mu = 0, not_a = 0, degenerate = 0;
    for (long rep = 0; rep < realizations; ++rep) {
      Rng r = rng.split(0x1000 + rep);
      const std::vector<int> types = sample_cci_types(params, n, r);
      const CciChannelCounts counts = cci_channel_counts(params, types);
      bool all_positive = true, all_above_half = true;
      for (long L : counts.L) {
        if (L == 0) all_positive = false;
        if (L < q_down * n / 2.0) all_above_half = false;
      }
      for (long R : counts.R) {
        if (R == 0) all_positive = false;
        if (R < q_down * n / 2.0) all_above_half = false;
      }
      if (!all_positive) {
        ++degenerate;
        ++not_a;
        continue;
      }
      if (!all_above_half) ++not_a;
      // mu_up over realized off-diagonal pairs, raw masses
      std::vector<long> type_counts(params.tau, 0);
      for (int t : types) ++type_counts[t];
      double mu_up = 0.0;
      for (int t = 0; t < params.tau; ++t) {
        if (type_counts[t] == 0) continue;
        for (int s = 0; s < params.tau; ++s) {
          if (type_counts[s] == 0) continue;
          if (t == s && type_counts[t] < 2) continue;
          mu_up = std::max(mu_up, cci_type_pair_mass(params, counts, t, s));
        }
      }
      if (mu_up > mu_threshold) ++bad_mu;
    }
    const double freq_bad_mu = static_cast<double>(bad_mu) / realizations;
    const double freq_not_a = static_cast<double>(not_a) / realizations;
    if (freq_bad_mu > freq_not_a) ++mass_implication_violations;
    const double chebyshev =
        params.l * params.r * 4.0 * (1.0 - q_down) / (n * q_down);
    if (freq_not_a > chebyshev + wald_slack(freq_not_a, realizations)) ++chebyshev_violations;
  }

  checks.push_back(detail::bounded("kernel <= alpha/(lambda_down rho_down), 100 params",
                                   static_cast<double>(kernel_violations), 0.0,
                                   "worst excess=" + std::to_string(worst_kernel_excess)));
  checks.push_back(detail::bounded(
      "freq(mu_up > 1/(n^2 q_down^2)) <= freq(not all L,R >= q_down n/2), 100 params",
      static_cast<double>(mass_implication_violations), 0.0));
  checks.push_back(detail::bounded("freq(not A) <= lr Chebyshev + 3se, 100 params",
                                   static_cast<double>(chebyshev_violations), 0.0));
  return checks;
}

// Criterion 13: lifted monotone events never violate their direction on
// random digraph subset pairs.
inline std::vector<SuiteCheck> monotonicity_preservation(std::uint64_t seed) {
  std::vector<SuiteCheck> checks;
  Rng base = Rng(seed).split(0xCD);
  for (const auto& event : builtin_events()) {
    if (event.monotonicity == Monotonicity::none) continue;
    const DigraphEventSpec lifted = lift_event(event);
    long violations = 0;
    for (long trial = 0; trial < 10'000; ++trial) {
      Rng rng = base.split(static_cast<std::uint64_t>(trial) * 131 + event.name.size());
      const int n = 3 + static_cast<int>(rng.below(4));
      const double density = rng.next_double();
      std::vector<std::pair<int, int>> big, small;
      const PairIndex index(n);
      for (int idx = 0; idx < PairIndex::ordered_count(n); ++idx) {
        if (!rng.bernoulli(density)) continue;
        big.push_back(index.ordered_at(idx));
        if (rng.bernoulli(0.5)) small.push_back(big.back());
      }
      const Digraph d2(n, big);
      const Digraph d1(n, small);
      const bool q1 = lifted.predicate(d1);
      const bool q2 = lifted.predicate(d2);
      if (lifted.monotonicity == Monotonicity::increasing && q1 && !q2) ++violations;
      if (lifted.monotonicity == Monotonicity::decreasing && q2 && !q1) ++violations;
    }
    checks.push_back(detail::bounded("lifted '" + event.name + "' preserves direction",
                                     static_cast<double>(violations), 0.0));
  }
  return checks;
}

}  // namespace criteria

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

inline std::vector<std::string> suite_names() {
  return {"gilbert-phi", "iag-ieg-exact", "iag-ieg-approx", "asrg-esrg", "martingale",
          "growth-bound", "cci-bounds",   "monotonicity",   "pipeline"};
}

namespace detail {

inline void append(std::vector<SuiteCheck>& out, std::vector<SuiteCheck> in) {
  for (auto& check : in) out.push_back(std::move(check));
}

inline std::vector<SuiteCheck> pipeline_checks(std::uint64_t seed) {
  std::vector<SuiteCheck> checks;

  // directed Gilbert tuned to the directed Erdos-Renyi arc count; gaps are
  // monitored as a trend, not thresholded
  const auto gilbert_factory = [](int n) {
    ModelSpec spec;
    spec.model_class = ModelClass::IAG;
    spec.instance = ModelInstance::directed_gilbert;
    spec.n = n;
    spec.params = GilbertParams{1.0 / (n - 1.0)};
    return spec;
  };
  const auto er_factory = [](int n) {
    ModelSpec spec;
    spec.model_class = ModelClass::ASRG;
    spec.instance = ModelInstance::directed_classical_er;
    spec.n = n;
    spec.params = SelectionCountParams{n};
    return spec;
  };
  const PipelineReport trend =
      equivalence_pipeline(gilbert_factory, er_factory, builtin_event("triangle"),
                           {6, 8, 10, 12}, 20'000, Rng(seed).split(0xCE).seed());
  for (const auto& point : trend.points) {
    SuiteCheck check;
    check.name = "pipeline gilbert-vs-er n=" + std::to_string(point.n) +
                 " undirected gap within allowance";
    check.informational = true;
    check.value = point.undirected_gap;
    check.bound = point.directed_gap + point.allowance_iag_ieg + point.allowance_asrg_esrg;
    check.pass = point.gap_within_allowance;
    check.detail = "p_ieg=" + std::to_string(point.p_ieg) +
                   " p_esrg=" + std::to_string(point.p_esrg);
    checks.push_back(check);
  }

  // trend across the grid: the undirected gap should not grow with n
  double worst_increase = 0.0;
  for (std::size_t i = 1; i < trend.points.size(); ++i)
    worst_increase = std::max(
        worst_increase, trend.points[i].undirected_gap - trend.points[i - 1].undirected_gap);
  SuiteCheck monotone;
  monotone.name = "pipeline gilbert-vs-er undirected gap nonincreasing along n grid";
  monotone.informational = true;
  monotone.value = worst_increase;
  monotone.bound = 0.02;  // Monte Carlo wiggle at 2e4 replicates
  monotone.pass = worst_increase <= monotone.bound;
  checks.push_back(monotone);

  // always-true event: all four probabilities are exactly one
  const PipelineReport trivial =
      equivalence_pipeline(gilbert_factory, er_factory, builtin_event("always-true"), {6},
                           2'000, Rng(seed).split(0xCE01).seed());
  const auto& point = trivial.points.front();
  SuiteCheck ones = criteria::detail::bounded(
      "pipeline always-true probabilities all equal 1",
      std::abs(point.p_iag - 1.0) + std::abs(point.p_asrg - 1.0) +
          std::abs(point.p_ieg - 1.0) + std::abs(point.p_esrg - 1.0),
      0.0);
  checks.push_back(ones);

  // CCI against the inhomogeneous random digraph with the derived kernel
  CciParameters cci;
  cci.tau = 2;
  cci.l = 1;
  cci.r = 1;
  cci.q = {0.5, 0.5};
  cci.p = {{1.0}};
  cci.I = {{1}, {1}};
  cci.J = {{1}, {1}};
  cci.alpha = 0.5;
  cci.validate();
  const auto kernel = cci_kernel(cci);
  const auto cci_factory = [cci](int n) {
    ModelSpec spec;
    spec.model_class = ModelClass::ASRG;
    spec.instance = ModelInstance::cci;
    spec.n = n;
    spec.params = cci;
    return spec;
  };
  const auto ird_factory = [cci, kernel](int n) {
    ModelSpec spec;
    spec.model_class = ModelClass::IAG;
    spec.instance = ModelInstance::ird;
    spec.n = n;
    spec.params = IrgParams{cci.q, kernel};
    return spec;
  };
  const PipelineReport cci_point =
      equivalence_pipeline(ird_factory, cci_factory, builtin_event("max-degree-ge-3"), {30},
                           20'000, Rng(seed).split(0xCE02).seed());
  const auto& cp = cci_point.points.front();
  SuiteCheck overlap;
  overlap.name = "pipeline cci-vs-ird directed estimates within joint 3se";
  overlap.informational = true;
  overlap.value = std::abs(cp.p_iag - cp.p_asrg);
  overlap.bound = 3.0 * std::sqrt(cp.se_iag * cp.se_iag + cp.se_asrg * cp.se_asrg);
  overlap.pass = overlap.value <= overlap.bound;
  overlap.detail = "p_ird=" + std::to_string(cp.p_iag) + " p_cci=" + std::to_string(cp.p_asrg);
  checks.push_back(overlap);
  return checks;
}

}  // namespace detail

inline SuiteResult run_suite(const std::string& name, std::uint64_t seed = kDefaultSeed) {
  SuiteResult result;
  result.suite = name;
  result.seed = seed;
  if (name == "gilbert-phi") {
    detail::append(result.checks, criteria::gilbert_identity(seed));
    detail::append(result.checks, criteria::event_transfer(seed));
    detail::append(result.checks, criteria::witness_identity(seed));
  } else if (name == "iag-ieg-exact") {
    detail::append(result.checks, criteria::exact_iag_ieg(seed));
  } else if (name == "iag-ieg-approx") {
    detail::append(result.checks, criteria::approx_error_law(seed));
    detail::append(result.checks, criteria::chernoff_event(seed));
  } else if (name == "asrg-esrg") {
    detail::append(result.checks, criteria::asrg_esrg_marginals(seed));
    detail::append(result.checks, criteria::psi_increment_law(seed));
    detail::append(result.checks, criteria::psi_tail_bound(seed));
  } else if (name == "martingale") {
    detail::append(result.checks, criteria::supermartingale_drift(seed));
  } else if (name == "growth-bound") {
    detail::append(result.checks, criteria::growth_bound_grid(seed));
  } else if (name == "cci-bounds") {
    detail::append(result.checks, criteria::cci_bounds(seed));
  } else if (name == "monotonicity") {
    detail::append(result.checks, criteria::monotonicity_preservation(seed));
  } else if (name == "pipeline") {
    detail::append(result.checks, detail::pipeline_checks(seed));
  } else {
    throw std::invalid_argument("unknown suite: " + name);
  }
  return result;
}

}  // namespace undirectify
