#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "undirectify/coupling.hpp"
#include "undirectify/events.hpp"
#include "undirectify/exact.hpp"
#include "undirectify/models.hpp"
#include "undirectify/rng.hpp"

namespace undirectify {

inline constexpr std::uint64_t kDefaultSeed = 0xDEADBEEFULL;

// ---------------------------------------------------------------------------
// Workers
// ---------------------------------------------------------------------------

inline int worker_count() {
  if (const char* env = std::getenv("UNDIRECTIFY_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// Runs fn(block, begin, end) over fixed-size replicate blocks. Blocks are
// fixed regardless of worker count and partials are returned in block order,
// so reductions are bit-identical for any thread setting.
template <class Partial, class BlockFn>
std::vector<Partial> map_blocks(long total, long block_size, BlockFn fn) {
  const long nblocks = total <= 0 ? 0 : (total + block_size - 1) / block_size;
  std::vector<Partial> partials(static_cast<std::size_t>(nblocks));
  const long workers = std::min<long>(worker_count(), nblocks);
  if (workers <= 1) {
    for (long b = 0; b < nblocks; ++b)
      partials[b] = fn(b, b * block_size, std::min(total, (b + 1) * block_size));
    return partials;
  }
  std::atomic<long> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (long t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      try {
        for (long b; (b = next.fetch_add(1)) < nblocks && !failed.load();)
          partials[b] = fn(b, b * block_size, std::min(total, (b + 1) * block_size));
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return partials;
}

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

struct MeanAccumulator {
  long n = 0;
  long double sum = 0.0L;
  long double sum_sq = 0.0L;

  void add(double x) {
    ++n;
    sum += x;
    sum_sq += static_cast<long double>(x) * x;
  }
  void merge(const MeanAccumulator& o) {
    n += o.n;
    sum += o.sum;
    sum_sq += o.sum_sq;
  }
  double mean() const { return n ? static_cast<double>(sum / n) : 0.0; }
  double variance() const {
    if (n < 2) return 0.0;
    const double m = mean();
    return std::max(0.0, static_cast<double>(sum_sq / n) - m * m);
  }
  double se() const { return n ? std::sqrt(variance() / n) : 0.0; }
};

// Wald standard-error slack with continuity correction.
inline double wald_slack(double phat, long n, double z = 3.0) {
  if (n <= 0) return 0.0;
  return z * std::sqrt(std::max(phat * (1.0 - phat), 0.0) / n) + 0.5 / n;
}

namespace detail {

inline double gamma_series_p(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_cf_q(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace detail

// Upper regularized incomplete gamma Q(a, x).
inline double regularized_gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("regularized_gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - detail::gamma_series_p(a, x);
  return detail::gamma_cf_q(a, x);
}

inline double chi_square_pvalue(double stat, int dof) {
  if (dof < 1) throw std::invalid_argument("chi_square_pvalue: dof must be positive");
  return regularized_gamma_q(dof / 2.0, stat / 2.0);
}

struct ChiSquareResult {
  double stat = 0.0;
  int dof = 0;
  double pvalue = 1.0;
  double impossible_mass = 0.0;  // observed frequency on zero-expected cells
};

// Goodness of fit of observed counts against an exact pmf over codes. Cells
// whose expected count falls below 5 are pooled.
inline ChiSquareResult chi_square_gof(const std::unordered_map<std::uint64_t, long>& observed,
                                      const GraphDistribution& expected, long total) {
  ChiSquareResult result;
  double pooled_obs = 0.0, pooled_exp = 0.0;
  std::vector<std::pair<double, double>> cells;  // (observed, expected) counts
  for (std::uint64_t code = 0; code < expected.size(); ++code) {
    const double p = expected.pmf()[code];
    const auto it = observed.find(code);
    const double obs = it == observed.end() ? 0.0 : static_cast<double>(it->second);
    if (p <= 0.0) {
      result.impossible_mass += obs / total;
      continue;
    }
    const double exp_count = p * total;
    if (exp_count < 5.0) {
      pooled_obs += obs;
      pooled_exp += exp_count;
    } else {
      cells.emplace_back(obs, exp_count);
    }
  }
  if (pooled_exp > 0.0) cells.emplace_back(pooled_obs, pooled_exp);
  if (result.impossible_mass > 0.0) {
    result.pvalue = 0.0;
    result.stat = std::numeric_limits<double>::infinity();
    result.dof = std::max<int>(1, static_cast<int>(cells.size()) - 1);
    return result;
  }
  double stat = 0.0;
  for (auto [obs, exp] : cells) stat += (obs - exp) * (obs - exp) / exp;
  result.stat = stat;
  result.dof = std::max<int>(1, static_cast<int>(cells.size()) - 1);
  result.pvalue = chi_square_pvalue(stat, result.dof);
  return result;
}

// ---------------------------------------------------------------------------
// Rate schedules and experiment configuration
// ---------------------------------------------------------------------------

// Named evaluable schedules for r_n and omega(n), kept as data so that
// reports describe themselves.
struct RateSchedule {
  enum class Kind { log_n, sqrt_n, constant, power };
  Kind kind = Kind::constant;
  double param = 1.0;

  double eval(double n) const {
    switch (kind) {
      case Kind::log_n: return param * std::log(n);
      case Kind::sqrt_n: return param * std::sqrt(n);
      case Kind::constant: return param;
      case Kind::power: return std::pow(n, param);
    }
    return param;
  }

  std::string name() const {
    switch (kind) {
      case Kind::log_n: return "log-n";
      case Kind::sqrt_n: return "sqrt-n";
      case Kind::constant: return "constant";
      case Kind::power: return "power";
    }
    return "constant";
  }
};

struct ExperimentConfig {
  std::vector<ModelSpec> specs;
  long replicates = 1;
  std::uint64_t base_seed = kDefaultSeed;
  std::vector<int> n_grid;
  RateSchedule rate;
  RateSchedule slack;

  void validate() const {
    if (replicates < 1) throw std::invalid_argument("config: replicates must be >= 1");
    if (specs.empty() || specs.size() > 2)
      throw std::invalid_argument("config: expected one or two specs");
    for (const auto& s : specs) s.validate();
    for (int n : n_grid) {
      for (const RateSchedule* r : {&rate, &slack}) {
        const double v = r->eval(n);
        if (!(v > 0.0) || !std::isfinite(v))
          throw std::invalid_argument("config: schedule " + r->name() +
                                      " not positive finite at n=" + std::to_string(n));
      }
    }
  }
};

// One bound-vs-estimate comparison; pass iff estimate <= bound + slack.
struct VerdictReport {
  std::string statistic;
  double estimate = 0.0;
  double se = 0.0;
  double bound = 0.0;
  double slack = 0.0;
  bool pass = true;
  bool informational = false;
  long replicates = 0;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, double>> details;
};

// ---------------------------------------------------------------------------
// Empirical total variation
// ---------------------------------------------------------------------------

namespace detail {

inline std::uint64_t sample_code_for_comparison(const ModelSpec& spec, Rng& rng,
                                                bool compare_digraphs) {
  if (spec.directed()) {
    Digraph d = sample_digraph(spec, rng);
    return compare_digraphs ? d.encode() : forgetful_map(d).encode();
  }
  if (compare_digraphs)
    throw std::invalid_argument("empirical_tv: cannot compare an undirected model as digraph");
  return sample_graph(spec, rng).encode();
}

inline double tv_between_counts(const std::unordered_map<std::uint64_t, long>& a, long total_a,
                                const std::unordered_map<std::uint64_t, long>& b, long total_b) {
  double acc = 0.0;
  for (const auto& [code, count] : a) {
    const auto it = b.find(code);
    const double pb = it == b.end() ? 0.0 : static_cast<double>(it->second) / total_b;
    acc += std::abs(static_cast<double>(count) / total_a - pb);
  }
  for (const auto& [code, count] : b)
    if (a.find(code) == a.end()) acc += static_cast<double>(count) / total_b;
  return acc / 2.0;
}

}  // namespace detail

struct EmpiricalTvResult {
  double estimate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  long replicates = 0;
  bool coverage_warning = false;  // state space large relative to replicates
};

// Plug-in TV between the empirical pmfs of two sampled models (biased upward)
// with a percentile bootstrap interval.
inline EmpiricalTvResult empirical_tv(const ModelSpec& spec_a, const ModelSpec& spec_b,
                                      long replicates, std::uint64_t seed,
                                      int bootstrap_resamples = 200) {
  spec_a.validate();
  spec_b.validate();
  if (spec_a.n != spec_b.n) throw std::invalid_argument("empirical_tv: n mismatch");
  const bool compare_digraphs = spec_a.directed() && spec_b.directed();

  EmpiricalTvResult result;
  result.replicates = replicates;
  const double state_count = compare_digraphs
                                 ? std::pow(4.0, PairIndex::unordered_count(spec_a.n))
                                 : std::pow(2.0, PairIndex::unordered_count(spec_a.n));
  result.coverage_warning = state_count > static_cast<double>(replicates) / 10.0;

  std::unordered_map<std::uint64_t, long> counts_a, counts_b;
  Rng base(seed);
  for (long k = 0; k < replicates; ++k) {
    Rng ra = base.split(2 * static_cast<std::uint64_t>(k));
    Rng rb = base.split(2 * static_cast<std::uint64_t>(k) + 1);
    ++counts_a[detail::sample_code_for_comparison(spec_a, ra, compare_digraphs)];
    ++counts_b[detail::sample_code_for_comparison(spec_b, rb, compare_digraphs)];
  }
  result.estimate = detail::tv_between_counts(counts_a, replicates, counts_b, replicates);

  // percentile bootstrap over multinomial resamples of both empirical pmfs
  if (bootstrap_resamples > 0) {
    std::vector<std::uint64_t> support_a, support_b;
    std::vector<double> weights_a, weights_b;
    for (const auto& [code, count] : counts_a) {
      support_a.push_back(code);
      weights_a.push_back(static_cast<double>(count));
    }
    for (const auto& [code, count] : counts_b) {
      support_b.push_back(code);
      weights_b.push_back(static_cast<double>(count));
    }
    DiscreteSampler sampler_a(weights_a), sampler_b(weights_b);
    Rng boot = base.split(0x626f6f74ULL);
    std::vector<double> tvs;
    tvs.reserve(bootstrap_resamples);
    for (int it = 0; it < bootstrap_resamples; ++it) {
      std::unordered_map<std::uint64_t, long> ra, rb;
      for (long k = 0; k < replicates; ++k) ++ra[support_a[sampler_a.draw(boot)]];
      for (long k = 0; k < replicates; ++k) ++rb[support_b[sampler_b.draw(boot)]];
      tvs.push_back(detail::tv_between_counts(ra, replicates, rb, replicates));
    }
    std::sort(tvs.begin(), tvs.end());
    const auto quantile = [&](double q) {
      const double pos = q * (tvs.size() - 1);
      const std::size_t lo = static_cast<std::size_t>(pos);
      const std::size_t hi = std::min(lo + 1, tvs.size() - 1);
      const double frac = pos - lo;
      return tvs[lo] * (1.0 - frac) + tvs[hi] * frac;
    };
    result.ci_lo = quantile(0.025);
    result.ci_hi = quantile(0.975);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Coupling studies
// ---------------------------------------------------------------------------

// Shared simulation behind the approximate IAG/IEG checks: one pass over the
// replicates serves the error-law assertions and every tail threshold.
struct ApproxCouplingStudy {
  long replicates = 0;
  int n = 0;
  double pi_up = 0.0;
  double exact_mean_xi = 0.0;  // sum over pairs of pi(v,w) pi(w,v)
  MeanAccumulator xi;
  long xi2_violations = 0;
  long recount_mismatches = 0;
  std::vector<double> tail_thresholds;
  std::vector<long> tail_counts;  // count of xi > threshold
};

inline ApproxCouplingStudy run_approx_coupling_study(const EdgeProbabilityFn& pi, long replicates,
                                                     std::uint64_t seed,
                                                     std::vector<double> tail_thresholds,
                                                     bool recount_each = true) {
  ApproxCouplingStudy study;
  study.replicates = replicates;
  study.n = pi.n();
  study.pi_up = pi.up();
  study.tail_thresholds = std::move(tail_thresholds);
  study.tail_counts.assign(study.tail_thresholds.size(), 0);
  for (int u = 0; u < PairIndex::unordered_count(pi.n()); ++u)
    study.exact_mean_xi += pi.at_ordered(2 * u) * pi.at_ordered(2 * u + 1);

  struct Partial {
    MeanAccumulator xi;
    long xi2_violations = 0;
    long recount_mismatches = 0;
    std::vector<long> tail_counts;
  };
  Rng base(seed);
  auto partials = map_blocks<Partial>(replicates, 8192, [&](long, long begin, long end) {
    Partial part;
    part.tail_counts.assign(study.tail_thresholds.size(), 0);
    for (long k = begin; k < end; ++k) {
      Rng rng = base.split(static_cast<std::uint64_t>(k));
      const CoupledSample sample = couple_iag_ieg_approx(pi, rng);
      part.xi.add(sample.xi1 + sample.xi2);
      if (sample.xi2 != 0) ++part.xi2_violations;
      if (recount_each) {
        if (recount_xi1(sample.graph, sample.digraph) != sample.xi1 ||
            recount_xi2(sample.graph, sample.digraph) != sample.xi2)
          ++part.recount_mismatches;
      }
      for (std::size_t t = 0; t < study.tail_thresholds.size(); ++t)
        if (sample.xi1 + sample.xi2 > study.tail_thresholds[t]) ++part.tail_counts[t];
    }
    return part;
  });
  for (const auto& part : partials) {
    study.xi.merge(part.xi);
    study.xi2_violations += part.xi2_violations;
    study.recount_mismatches += part.recount_mismatches;
    for (std::size_t t = 0; t < study.tail_counts.size(); ++t)
      study.tail_counts[t] += part.tail_counts[t];
  }
  return study;
}

// Chernoff-style verdicts: frequency of {Xi > 2 omega max(1, (n pi_up)^2)}
// must stay below exp(-3 omega / 2) plus Monte Carlo slack.
inline std::vector<VerdictReport> chernoff_xi_check(const EdgeProbabilityFn& pi,
                                                    const std::vector<double>& omegas,
                                                    long replicates, std::uint64_t seed) {
  const double scale = std::max(1.0, std::pow(pi.n() * pi.up(), 2.0));
  std::vector<double> thresholds;
  thresholds.reserve(omegas.size());
  for (double omega : omegas) thresholds.push_back(2.0 * omega * scale);
  const ApproxCouplingStudy study =
      run_approx_coupling_study(pi, replicates, seed, thresholds, /*recount_each=*/false);

  std::vector<VerdictReport> verdicts;
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    VerdictReport v;
    v.statistic = "chernoff-xi omega=" + std::to_string(omegas[i]);
    v.replicates = replicates;
    v.seed = seed;
    v.estimate = static_cast<double>(study.tail_counts[i]) / replicates;
    v.se = std::sqrt(std::max(v.estimate * (1.0 - v.estimate), 0.0) / replicates);
    v.bound = std::exp(-1.5 * omegas[i]);
    v.slack = wald_slack(v.estimate, replicates);
    v.pass = v.estimate <= v.bound + v.slack;
    v.details = {{"threshold", thresholds[i]},
                 {"omega", omegas[i]},
                 {"pi_up", study.pi_up},
                 {"n", static_cast<double>(study.n)}};
    verdicts.push_back(std::move(v));
  }
  return verdicts;
}

// Shared simulation behind the selection-coupling checks: marginal pmfs,
// tail bounds, increment law cells and terminal martingale drift all come
// from the same replicate stream.
struct AsrgCouplingStudy {
  long replicates = 0;
  long degenerate = 0;
  int n = 0, m = 0;
  double mu_up = 0.0;
  std::array<long, 3> rule_counts{0, 0, 0};
  long increment_rule_mismatches = 0;  // psi increments not matching rule-III indicators
  long recount_mismatches = 0;
  std::vector<double> tail_thresholds;
  std::vector<long> tail_counts;  // count of psi_m >= threshold
  MeanAccumulator terminal_m;     // M_m across replicates
  // (s, psi_s) -> [observations, rule-III increments at step s+1]
  std::map<std::pair<int, int>, std::pair<long, long>> cells;
  // empirical pmfs (filled when collect_codes)
  std::unordered_map<std::uint64_t, long> graph_counts;
  std::unordered_map<std::uint64_t, long> digraph_counts;
};

struct AsrgStudyOptions {
  std::vector<double> tail_thresholds;
  bool collect_codes = false;
  bool track_martingale = true;
  bool recount_each = true;
};

inline AsrgCouplingStudy run_asrg_coupling_study(const EdgeMassFn& mu, int m, long replicates,
                                                 std::uint64_t seed,
                                                 AsrgStudyOptions options = {}) {
  AsrgCouplingStudy study;
  study.replicates = replicates;
  study.n = mu.n();
  study.m = m;
  study.mu_up = mu.up();
  study.tail_thresholds = options.tail_thresholds;
  study.tail_counts.assign(options.tail_thresholds.size(), 0);

  Rng base(seed);
  using Cells = std::map<std::pair<int, int>, std::pair<long, long>>;
  struct Partial {
    long degenerate = 0;
    std::array<long, 3> rule_counts{0, 0, 0};
    long increment_rule_mismatches = 0;
    long recount_mismatches = 0;
    std::vector<long> tail_counts;
    MeanAccumulator terminal_m;
    Cells cells;
    std::unordered_map<std::uint64_t, long> graph_counts, digraph_counts;
  };
  auto partials = map_blocks<Partial>(replicates, 8192, [&](long, long begin, long end) {
    Partial part;
    part.tail_counts.assign(options.tail_thresholds.size(), 0);
    for (long k = begin; k < end; ++k) {
      Rng rng = base.split(static_cast<std::uint64_t>(k));
      const CoupledSample sample = couple_asrg_esrg(mu, m, rng);
      if (sample.degenerate) {
        ++part.degenerate;
        continue;
      }
      for (int i = 0; i < 3; ++i) part.rule_counts[i] += sample.rule_counts[i];
      for (std::size_t s = 0; s + 1 < sample.psi.size(); ++s) {
        const int increment = sample.psi[s + 1] - sample.psi[s];
        const bool rule3 = sample.rules[s] == 3;
        if (increment != (rule3 ? 1 : 0) || increment < 0 || increment > 1)
          ++part.increment_rule_mismatches;
        auto& cell = part.cells[{static_cast<int>(s), sample.psi[s]}];
        ++cell.first;
        cell.second += increment;
      }
      if (options.recount_each) {
        if (recount_xi1(sample.graph, sample.digraph) != sample.xi1 ||
            recount_xi2(sample.graph, sample.digraph) != sample.xi2 || sample.xi2 != 0)
          ++part.recount_mismatches;
      }
      for (std::size_t t = 0; t < options.tail_thresholds.size(); ++t)
        if (sample.psi.back() >= options.tail_thresholds[t]) ++part.tail_counts[t];
      if (options.track_martingale) {
        const MartingaleTrace trace = martingale_transform(sample.psi, study.mu_up);
        part.terminal_m.add(trace.m_values.back());
      }
      if (options.collect_codes) {
        ++part.graph_counts[sample.graph.encode()];
        ++part.digraph_counts[sample.digraph.encode()];
      }
    }
    return part;
  });
  for (const auto& part : partials) {
    study.degenerate += part.degenerate;
    for (int i = 0; i < 3; ++i) study.rule_counts[i] += part.rule_counts[i];
    study.increment_rule_mismatches += part.increment_rule_mismatches;
    study.recount_mismatches += part.recount_mismatches;
    for (std::size_t t = 0; t < study.tail_counts.size(); ++t)
      study.tail_counts[t] += part.tail_counts[t];
    study.terminal_m.merge(part.terminal_m);
    for (const auto& [key, cell] : part.cells) {
      auto& acc = study.cells[key];
      acc.first += cell.first;
      acc.second += cell.second;
    }
    for (const auto& [code, count] : part.graph_counts) study.graph_counts[code] += count;
    for (const auto& [code, count] : part.digraph_counts) study.digraph_counts[code] += count;
  }
  return study;
}

// Spec-level wrapper: realizes the IAG once (conditioned on its vertex
// vector) and runs the Chernoff verdicts on the realized probabilities.
inline std::vector<VerdictReport> chernoff_xi_check(const ModelSpec& spec,
                                                    const std::vector<double>& omegas,
                                                    long replicates, std::uint64_t seed) {
  if (spec.model_class != ModelClass::IAG)
    throw std::invalid_argument("chernoff_xi_check: spec must be an IAG model");
  Rng rng = Rng(seed).split(0xFEED);
  const auto realized = realize_independent(spec, rng);
  return chernoff_xi_check(realized.pi, omegas, replicates, seed);
}

// Tail verdicts: P(Psi_m >= 1/r + m^2 mu_up) <= r m^2 mu_up plus slack.
inline std::vector<VerdictReport> psi_tail_check(const EdgeMassFn& mu, int m,
                                                 const std::vector<double>& rs, long replicates,
                                                 std::uint64_t seed) {
  const double mu_up = mu.up();
  std::vector<double> thresholds;
  thresholds.reserve(rs.size());
  for (double r : rs) thresholds.push_back(1.0 / r + m * m * mu_up);
  AsrgStudyOptions options;
  options.tail_thresholds = thresholds;
  options.track_martingale = false;
  options.recount_each = false;
  const AsrgCouplingStudy study = run_asrg_coupling_study(mu, m, replicates, seed, options);

  std::vector<VerdictReport> verdicts;
  const long usable = replicates - study.degenerate;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    VerdictReport v;
    v.statistic = "psi-tail r=" + std::to_string(rs[i]);
    v.replicates = usable;
    v.seed = seed;
    v.estimate = usable ? static_cast<double>(study.tail_counts[i]) / usable : 0.0;
    v.se = usable ? std::sqrt(std::max(v.estimate * (1.0 - v.estimate), 0.0) / usable) : 0.0;
    v.bound = rs[i] * m * m * mu_up;
    v.slack = wald_slack(v.estimate, usable);
    v.pass = v.estimate <= v.bound + v.slack;
    v.details = {{"threshold", thresholds[i]},
                 {"r", rs[i]},
                 {"mu_up", mu_up},
                 {"m", static_cast<double>(m)},
                 {"degenerate", static_cast<double>(study.degenerate)}};
    verdicts.push_back(std::move(v));
  }
  return verdicts;
}

inline std::vector<VerdictReport> psi_tail_check(const ModelSpec& spec,
                                                 const std::vector<double>& rs, long replicates,
                                                 std::uint64_t seed) {
  if (spec.model_class != ModelClass::ASRG)
    throw std::invalid_argument("psi_tail_check: spec must be an ASRG model");
  Rng rng = Rng(seed).split(0xFEED);
  const auto realized = realize_selection(spec, rng);
  return psi_tail_check(realized.mu, realized.m, rs, replicates, seed);
}

// ---------------------------------------------------------------------------
// Insensitivity probe
// ---------------------------------------------------------------------------

struct InsensitivityStrategyResult {
  std::string name;
  double delta = 0.0;  // P(q(perturbed)) - P(q(original)), paired estimate
  double se = 0.0;
};

struct InsensitivityReport {
  std::string event;
  int rate = 0;
  long replicates = 0;
  double base_probability = 0.0;
  double base_se = 0.0;
  std::vector<InsensitivityStrategyResult> strategies;
  double max_abs_delta = 0.0;
  bool exact_available = false;
  double exact_base = 0.0;
  double exact_max_delta = 0.0;  // maximizing adversary
  double exact_min_delta = 0.0;  // minimizing adversary
};

namespace detail {

inline std::vector<int> absent_pairs(const Graph& g) {
  std::vector<int> out;
  const int total = PairIndex::unordered_count(g.vertex_count());
  for (int u = 0; u < total; ++u)
    if (!g.has_edge_at(u)) out.push_back(u);
  return out;
}

inline Graph add_pair(const Graph& g, int unordered_index) {
  const PairIndex index(g.vertex_count());
  return perturb_graph(g, {index.unordered_at(unordered_index)}, {});
}

// Depth-1 greedy adversary: take a single addition that flips the predicate
// to `target` if one exists; otherwise burn a step on the first absent pair.
inline bool greedy_additions(const Graph& start, const EventSpec& q, int rate, bool target) {
  Graph g = start;
  for (int step = 0; step < rate; ++step) {
    if (q.predicate(g) == target) return target;
    const std::vector<int> absent = absent_pairs(g);
    if (absent.empty()) break;
    int chosen = absent.front();
    for (int u : absent) {
      if (q.predicate(add_pair(g, u)) == target) {
        chosen = u;
        break;
      }
    }
    g = add_pair(g, chosen);
  }
  return q.predicate(g);
}

inline bool random_additions(const Graph& start, const EventSpec& q, int rate, Rng& rng) {
  Graph g = start;
  for (int step = 0; step < rate; ++step) {
    const std::vector<int> absent = absent_pairs(g);
    if (absent.empty()) break;
    g = add_pair(g, absent[rng.below(absent.size())]);
  }
  return q.predicate(g);
}

// Whether some addition set of size <= rate lands the predicate on `target`.
inline bool reachable_by_additions(const Graph& g, const EventSpec& q, int rate, bool target,
                                   long& budget) {
  if (--budget < 0) throw std::domain_error("insensitivity probe: enumeration budget exhausted");
  if (q.predicate(g) == target) return true;
  if (rate == 0) return false;
  for (int u : absent_pairs(g))
    if (reachable_by_additions(add_pair(g, u), q, rate - 1, target, budget)) return true;
  return false;
}

}  // namespace detail

// Probes event insensitivity for increase at the given rate. This is a finite
// sample probe over a few adversary strategies, not a certificate: the
// definition quantifies over all modification rules. When the spec admits an
// exact distribution and the addition space is small, exact adversary values
// are reported as well.
inline InsensitivityReport insensitivity_probe(const ModelSpec& spec, const EventSpec& q,
                                               int rate, long replicates, std::uint64_t seed) {
  spec.validate();
  if (spec.directed()) throw std::invalid_argument("insensitivity_probe: spec must be undirected");
  if (rate < 0 || rate > PairIndex::unordered_count(spec.n))
    throw std::invalid_argument("insensitivity_probe: rate outside [0, C(n,2)]");

  InsensitivityReport report;
  report.event = q.name;
  report.rate = rate;
  report.replicates = replicates;

  MeanAccumulator base, greedy_true_diff, greedy_false_diff, random_diff;
  Rng rng_base(seed);
  for (long k = 0; k < replicates; ++k) {
    Rng rng = rng_base.split(static_cast<std::uint64_t>(k));
    const Graph g = sample_graph(spec, rng);
    const double original = q.predicate(g) ? 1.0 : 0.0;
    base.add(original);
    greedy_true_diff.add((detail::greedy_additions(g, q, rate, true) ? 1.0 : 0.0) - original);
    greedy_false_diff.add((detail::greedy_additions(g, q, rate, false) ? 1.0 : 0.0) - original);
    random_diff.add((detail::random_additions(g, q, rate, rng) ? 1.0 : 0.0) - original);
  }
  report.base_probability = base.mean();
  report.base_se = base.se();
  report.strategies = {
      {"greedy-make-true", greedy_true_diff.mean(), greedy_true_diff.se()},
      {"greedy-make-false", greedy_false_diff.mean(), greedy_false_diff.se()},
      {"random-additions", random_diff.mean(), random_diff.se()},
  };
  for (const auto& s : report.strategies)
    report.max_abs_delta = std::max(report.max_abs_delta, std::abs(s.delta));

  // exact enumeration when the distribution and the addition space are small
  const bool type_free = spec.instance == ModelInstance::gilbert ||
                         spec.instance == ModelInstance::classical_er ||
                         spec.instance == ModelInstance::custom;
  if (type_free && spec.n <= kMaxEnumerationGraphN) {
    double subsets = 0.0, choose = 1.0;
    for (int k = 0; k <= rate; ++k) {
      subsets += choose;
      choose *= static_cast<double>(PairIndex::unordered_count(spec.n) - k) / (k + 1);
    }
    if (subsets * static_cast<double>(graph_code_count(spec.n)) <= 1e5) {
      const GraphDistribution dist = exact_model_distribution(spec, seed).dist;
      long budget = 2'000'000;
      long double p_base = 0.0L, p_max = 0.0L, p_min = 0.0L;
      for (std::uint64_t code = 0; code < dist.size(); ++code) {
        const double p = dist.pmf()[code];
        if (p == 0.0) continue;
        const Graph g = Graph::decode(code, spec.n);
        if (q.predicate(g)) p_base += p;
        if (detail::reachable_by_additions(g, q, rate, true, budget)) p_max += p;
        if (!detail::reachable_by_additions(g, q, rate, false, budget)) p_min += p;
      }
      report.exact_available = true;
      report.exact_base = static_cast<double>(p_base);
      report.exact_max_delta = static_cast<double>(p_max - p_base);
      report.exact_min_delta = static_cast<double>(p_min - p_base);
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Coupling run reports (CLI-facing)
// ---------------------------------------------------------------------------

struct CouplingRunReport {
  std::string pair;
  long replicates = 0;
  std::uint64_t seed = 0;
  int n = 0;
  bool conditioned_on_types = false;
  std::vector<int> types;
  double mean_xi1 = 0.0, mean_xi2 = 0.0;
  int max_xi1 = 0, max_xi2 = 0;
  double mean_psi_m = 0.0;
  std::array<long, 3> rule_counts{0, 0, 0};
  long degenerate = 0;
  long recount_mismatches = 0;
  std::vector<std::array<int, 3>> kept;  // (xi1, xi2, psi_m; -1 when not tracked)
  std::vector<VerdictReport> bound_checks;
};

// Runs one of the three couplings for a directed spec, conditioned on a
// single realized vertex vector, and aggregates error statistics plus the
// matching bound verdicts. The first `keep` replicates are echoed row by row.
inline CouplingRunReport run_coupling_report(const std::string& pair, const ModelSpec& spec,
                                             long replicates, std::uint64_t seed,
                                             long keep = 0) {
  spec.validate();
  if (!spec.directed())
    throw std::invalid_argument("couple: spec must be a directed model (IAG or ASRG)");
  CouplingRunReport report;
  report.pair = pair;
  report.replicates = replicates;
  report.seed = seed;
  report.n = spec.n;
  keep = std::min(keep, replicates);

  Rng base(seed);
  Rng realize_rng = base.split(0xFEED);
  const bool selection_pair = pair == "asrg-esrg";
  if ((pair == "iag-ieg-exact" || pair == "iag-ieg-approx") && spec.independent()) {
    const auto realized = realize_independent(spec, realize_rng);
    if (!std::holds_alternative<std::monostate>(realized.vertices.types.front())) {
      report.conditioned_on_types = true;
      report.types = int_types(realized.vertices);
    }
    const bool exact = pair == "iag-ieg-exact";
    MeanAccumulator xi1, xi2;
    for (long k = 0; k < replicates; ++k) {
      Rng rng = base.split(static_cast<std::uint64_t>(k));
      const CoupledSample sample = exact ? couple_iag_ieg_exact(realized.pi, rng)
                                         : couple_iag_ieg_approx(realized.pi, rng);
      xi1.add(sample.xi1);
      xi2.add(sample.xi2);
      report.max_xi1 = std::max(report.max_xi1, sample.xi1);
      report.max_xi2 = std::max(report.max_xi2, sample.xi2);
      if (recount_xi1(sample.graph, sample.digraph) != sample.xi1 ||
          recount_xi2(sample.graph, sample.digraph) != sample.xi2)
        ++report.recount_mismatches;
      if (k < keep) report.kept.push_back({sample.xi1, sample.xi2, -1});
    }
    report.mean_xi1 = xi1.mean();
    report.mean_xi2 = xi2.mean();

    VerdictReport xi2_zero;
    xi2_zero.statistic = "xi2 = 0 in every replicate";
    xi2_zero.estimate = report.max_xi2;
    xi2_zero.bound = 0.0;
    xi2_zero.pass = report.max_xi2 == 0;
    xi2_zero.replicates = replicates;
    xi2_zero.seed = seed;
    report.bound_checks.push_back(xi2_zero);
    if (exact) {
      VerdictReport zero;
      zero.statistic = "xi = 0 in every replicate";
      zero.estimate = std::max(report.max_xi1, report.max_xi2);
      zero.bound = 0.0;
      zero.pass = report.max_xi1 == 0 && report.max_xi2 == 0;
      zero.replicates = replicates;
      zero.seed = seed;
      report.bound_checks.push_back(zero);
    } else {
      VerdictReport mean_bound;
      mean_bound.statistic = "mean xi <= (n pi_up)^2";
      mean_bound.estimate = report.mean_xi1 + report.mean_xi2;
      mean_bound.bound = std::pow(spec.n * realized.pi.up(), 2.0);
      mean_bound.se = xi1.se();
      mean_bound.pass = mean_bound.estimate <= mean_bound.bound;
      mean_bound.replicates = replicates;
      mean_bound.seed = seed;
      report.bound_checks.push_back(mean_bound);
    }
    return report;
  }
  if (selection_pair && !spec.independent()) {
    const auto realized = realize_selection(spec, realize_rng);
    if (!std::holds_alternative<std::monostate>(realized.vertices.types.front())) {
      report.conditioned_on_types = true;
      report.types = int_types(realized.vertices);
    }
    MeanAccumulator xi1, xi2, psi_m;
    for (long k = 0; k < replicates; ++k) {
      Rng rng = base.split(static_cast<std::uint64_t>(k));
      const CoupledSample sample = couple_asrg_esrg(realized.mu, realized.m, rng);
      if (sample.degenerate) {
        ++report.degenerate;
        continue;
      }
      xi1.add(sample.xi1);
      xi2.add(sample.xi2);
      psi_m.add(sample.psi.back());
      for (int i = 0; i < 3; ++i) report.rule_counts[i] += sample.rule_counts[i];
      report.max_xi1 = std::max(report.max_xi1, sample.xi1);
      report.max_xi2 = std::max(report.max_xi2, sample.xi2);
      if (recount_xi1(sample.graph, sample.digraph) != sample.xi1 ||
          recount_xi2(sample.graph, sample.digraph) != sample.xi2)
        ++report.recount_mismatches;
      if (k < keep) report.kept.push_back({sample.xi1, sample.xi2, sample.psi.back()});
    }
    report.mean_xi1 = xi1.mean();
    report.mean_xi2 = xi2.mean();
    report.mean_psi_m = psi_m.mean();

    VerdictReport xi2_zero;
    xi2_zero.statistic = "xi2 = 0 in every replicate";
    xi2_zero.estimate = report.max_xi2;
    xi2_zero.bound = 0.0;
    xi2_zero.pass = report.max_xi2 == 0;
    xi2_zero.replicates = replicates;
    xi2_zero.seed = seed;
    report.bound_checks.push_back(xi2_zero);
    for (auto& v : psi_tail_check(realized.mu, realized.m, {2.0}, replicates, seed))
      report.bound_checks.push_back(std::move(v));
    return report;
  }
  throw std::invalid_argument("couple: pair '" + pair + "' incompatible with spec class " +
                              to_string(spec.model_class));
}

// ---------------------------------------------------------------------------
// Equivalence pipeline
// ---------------------------------------------------------------------------

struct PipelinePoint {
  int n = 0;
  long replicates = 0;
  double p_iag = 0.0, p_asrg = 0.0, p_ieg = 0.0, p_esrg = 0.0;
  double se_iag = 0.0, se_asrg = 0.0, se_ieg = 0.0, se_esrg = 0.0;
  double directed_gap = 0.0;
  double undirected_gap = 0.0;
  double allowance_iag_ieg = 0.0;   // mean of sum pi(v,w) pi(w,v)
  double allowance_asrg_esrg = 0.0; // mean compensator growth bound on E[Psi_m]
  bool gap_within_allowance = true; // informational
  long skipped = 0;
};

struct PipelineReport {
  std::string event;
  std::uint64_t seed = 0;
  std::vector<PipelinePoint> points;
};

// Estimates all four event probabilities of the equivalence chain per grid
// point and reports whether the undirected gap stays within the directed gap
// plus the coupling-error allowances. Informational: no hard threshold.
inline PipelineReport equivalence_pipeline(const std::function<ModelSpec(int)>& iag_factory,
                                           const std::function<ModelSpec(int)>& asrg_factory,
                                           const EventSpec& q, const std::vector<int>& n_grid,
                                           long replicates, std::uint64_t seed) {
  PipelineReport report;
  report.event = q.name;
  report.seed = seed;
  const DigraphEventSpec lifted = lift_event(q);

  Rng base(seed);
  std::uint64_t stream = 0;
  for (int n : n_grid) {
    ModelSpec iag_spec = iag_factory(n);
    ModelSpec asrg_spec = asrg_factory(n);
    iag_spec.validate();
    asrg_spec.validate();
    if (!iag_spec.directed() || iag_spec.independent() == false)
      throw std::invalid_argument("pipeline: first spec must be an IAG model");
    if (!asrg_spec.directed() || asrg_spec.independent())
      throw std::invalid_argument("pipeline: second spec must be an ASRG model");

    PipelinePoint point;
    point.n = n;
    point.replicates = replicates;
    MeanAccumulator iag, asrg, ieg, esrg, allow_pi, allow_mu;
    for (long k = 0; k < replicates; ++k) {
      Rng r_iag = base.split(stream + 4 * static_cast<std::uint64_t>(k));
      Rng r_ieg = base.split(stream + 4 * static_cast<std::uint64_t>(k) + 1);
      Rng r_asrg = base.split(stream + 4 * static_cast<std::uint64_t>(k) + 2);
      Rng r_esrg = base.split(stream + 4 * static_cast<std::uint64_t>(k) + 3);
      try {
        const auto realized_iag = realize_independent(iag_spec, r_iag);
        iag.add(lifted.predicate(sample_iag(realized_iag.pi, r_iag)) ? 1.0 : 0.0);
        double cross = 0.0;
        for (int u = 0; u < PairIndex::unordered_count(n); ++u)
          cross += realized_iag.pi.at_ordered(2 * u) * realized_iag.pi.at_ordered(2 * u + 1);
        allow_pi.add(cross);

        const auto realized_ieg = realize_independent(iag_spec, r_ieg);
        ieg.add(q.predicate(sample_ieg(realized_ieg.pi.circ(), r_ieg)) ? 1.0 : 0.0);

        const auto realized_asrg = realize_selection(asrg_spec, r_asrg);
        asrg.add(lifted.predicate(sample_asrg(realized_asrg.mu, realized_asrg.m, r_asrg)) ? 1.0
                                                                                          : 0.0);
        allow_mu.add(growth_bound(realized_asrg.m, 1.0 / realized_asrg.mu.up()));

        const auto realized_esrg = realize_selection(asrg_spec, r_esrg);
        esrg.add(q.predicate(sample_esrg(realized_esrg.mu.circ(), realized_esrg.m, r_esrg))
                     ? 1.0
                     : 0.0);
      } catch (const DegenerateRealizationError&) {
        ++point.skipped;
      }
    }
    stream += 4 * static_cast<std::uint64_t>(replicates) + 16;
    point.p_iag = iag.mean();
    point.p_asrg = asrg.mean();
    point.p_ieg = ieg.mean();
    point.p_esrg = esrg.mean();
    point.se_iag = iag.se();
    point.se_asrg = asrg.se();
    point.se_ieg = ieg.se();
    point.se_esrg = esrg.se();
    point.directed_gap = std::abs(point.p_iag - point.p_asrg);
    point.undirected_gap = std::abs(point.p_ieg - point.p_esrg);
    point.allowance_iag_ieg = allow_pi.mean();
    point.allowance_asrg_esrg = allow_mu.mean();
    const double mc_slack = 3.0 * std::sqrt(point.se_iag * point.se_iag +
                                            point.se_asrg * point.se_asrg +
                                            point.se_ieg * point.se_ieg +
                                            point.se_esrg * point.se_esrg);
    point.gap_within_allowance =
        point.undirected_gap <= point.directed_gap + point.allowance_iag_ieg +
                                    point.allowance_asrg_esrg + mc_slack;
    report.points.push_back(std::move(point));
  }
  return report;
}

}  // namespace undirectify
