#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "undirectify/exact.hpp"
#include "undirectify/graph.hpp"
#include "undirectify/rng.hpp"

namespace undirectify {

inline constexpr long kRejectionIterationCap = 1'000'000;
inline constexpr int kSelectionExactMCap = 6;

// ---------------------------------------------------------------------------
// Realized pair functions
// ---------------------------------------------------------------------------

// Connection probabilities evaluated on a realized vertex vector, stored per
// ordered pair. Symmetric models carry mirrored values.
class EdgeProbabilityFn {
 public:
  EdgeProbabilityFn(int n, std::vector<double> ordered_values, bool symmetric)
      : n_(n), symmetric_(symmetric), values_(std::move(ordered_values)) {
    if (static_cast<int>(values_.size()) != PairIndex::ordered_count(n))
      throw std::invalid_argument("EdgeProbabilityFn: value count mismatch");
    for (double p : values_)
      if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("EdgeProbabilityFn: probability outside [0,1]");
    if (symmetric_) {
      for (std::size_t i = 0; i < values_.size(); i += 2)
        if (values_[i] != values_[i + 1])
          throw std::invalid_argument("EdgeProbabilityFn: symmetric flag with asymmetric values");
    }
  }

  static EdgeProbabilityFn constant(int n, double p, bool symmetric = true) {
    return EdgeProbabilityFn(n, std::vector<double>(PairIndex::ordered_count(n), p), symmetric);
  }

  int n() const { return n_; }
  bool symmetric() const { return symmetric_; }
  const std::vector<double>& values() const { return values_; }

  double at(int v, int w) const { return values_[PairIndex(n_).ordered(v, w)]; }
  double at_ordered(int index) const { return values_[index]; }

  // pi up-arrow: max over realized ordered pairs
  double up() const { return *std::max_element(values_.begin(), values_.end()); }

  // pi'(v,w) = 1 - (1 - pi(v,w))(1 - pi(w,v)), the exact forgetful image
  EdgeProbabilityFn prime() const {
    std::vector<double> out(values_.size());
    for (std::size_t u = 0; u + 1 < values_.size(); u += 2) {
      const double a = values_[u], b = values_[u + 1];
      out[u] = out[u + 1] = 1.0 - (1.0 - a) * (1.0 - b);
    }
    return EdgeProbabilityFn(n_, std::move(out), true);
  }

  // raw sums pi(v,w) + pi(w,v), one per unordered pair; may exceed 1
  std::vector<double> circ_raw() const {
    std::vector<double> out(values_.size() / 2);
    for (std::size_t u = 0; u < out.size(); ++u) out[u] = values_[2 * u] + values_[2 * u + 1];
    return out;
  }

  // pi-circ as a probability function; rejects when any pair sums above 1
  EdgeProbabilityFn circ() const {
    std::vector<double> sums = circ_raw();
    std::vector<double> out(values_.size());
    const PairIndex index(n_);
    for (std::size_t u = 0; u < sums.size(); ++u) {
      if (sums[u] > 1.0) {
        auto [v, w] = index.unordered_at(static_cast<int>(u));
        throw std::domain_error("pi-circ exceeds 1 at pair (" + std::to_string(v) + "," +
                                std::to_string(w) + "): " + std::to_string(sums[u]));
      }
      out[2 * u] = out[2 * u + 1] = sums[u];
    }
    return EdgeProbabilityFn(n_, std::move(out), true);
  }

 private:
  int n_;
  bool symmetric_;
  std::vector<double> values_;
};

// A mass function over ordered or unordered vertex pairs of a realized vertex
// vector. Strict construction requires total mass 1 within 1e-9.
class EdgeMassFn {
 public:
  enum class Domain { ordered, unordered };

  EdgeMassFn(int n, Domain domain, std::vector<double> values, bool strict = true)
      : n_(n), domain_(domain), values_(std::move(values)) {
    const int expected = domain == Domain::ordered ? PairIndex::ordered_count(n)
                                                   : PairIndex::unordered_count(n);
    if (static_cast<int>(values_.size()) != expected)
      throw std::invalid_argument("EdgeMassFn: value count mismatch");
    double total = 0.0;
    for (double x : values_) {
      if (x < 0.0) throw std::invalid_argument("EdgeMassFn: negative mass");
      total += x;
    }
    if (strict && std::abs(total - 1.0) > 1e-9)
      throw std::invalid_argument("EdgeMassFn: mass sums to " + std::to_string(total));
    if (total <= 0.0) throw std::invalid_argument("EdgeMassFn: no positive mass");
  }

  static EdgeMassFn uniform(int n, Domain domain) {
    const int count = domain == Domain::ordered ? PairIndex::ordered_count(n)
                                                : PairIndex::unordered_count(n);
    return EdgeMassFn(n, domain, std::vector<double>(count, 1.0 / count));
  }

  int n() const { return n_; }
  Domain domain() const { return domain_; }
  const std::vector<double>& values() const { return values_; }

  double at(int v, int w) const {
    const PairIndex index(n_);
    return domain_ == Domain::ordered ? values_[index.ordered(v, w)]
                                      : values_[index.unordered(v, w)];
  }

  // mu up-arrow: max mass over the domain
  double up() const { return *std::max_element(values_.begin(), values_.end()); }

  int positive_count() const {
    int c = 0;
    for (double x : values_)
      if (x > 0.0) ++c;
    return c;
  }

  // mu-circ(v,w) = mu(v,w) + mu(w,v) on unordered pairs
  EdgeMassFn circ() const {
    if (domain_ != Domain::ordered)
      throw std::logic_error("EdgeMassFn::circ: already unordered");
    std::vector<double> out(values_.size() / 2);
    for (std::size_t u = 0; u < out.size(); ++u) out[u] = values_[2 * u] + values_[2 * u + 1];
    return EdgeMassFn(n_, Domain::unordered, std::move(out));
  }

 private:
  int n_;
  Domain domain_;
  std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// Vertex types
// ---------------------------------------------------------------------------

struct GirgVertex {
  std::vector<double> position;  // in [0,1)^d, torus with infinity-norm metric
  double weight = 1.0;
};

using VertexType = std::variant<std::monostate, int, GirgVertex>;

struct TypedVertexVector {
  int n = 0;
  std::vector<VertexType> types;  // |types| == n
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (static_cast<int>(types.size()) != n)
      throw std::invalid_argument("TypedVertexVector: |types| != n");
  }
};

inline std::vector<int> int_types(const TypedVertexVector& v) {
  std::vector<int> out;
  out.reserve(v.types.size());
  for (const auto& t : v.types) {
    if (!std::holds_alternative<int>(t))
      throw std::invalid_argument("TypedVertexVector: expected integer types");
    out.push_back(std::get<int>(t));
  }
  return out;
}

// ---------------------------------------------------------------------------
// CCI parameters
// ---------------------------------------------------------------------------

struct CciParameters {
  int tau = 1, l = 1, r = 1;
  std::vector<double> q;               // type pmf, size tau
  std::vector<std::vector<double>> p;  // channel pmf, l x r
  std::vector<std::vector<int>> I;     // out-channel indicators, tau x l
  std::vector<std::vector<int>> J;     // in-channel indicators, tau x r
  double alpha = 1.0;

  double lambda(int i) const {
    double s = 0.0;
    for (int k = 0; k < tau; ++k) s += q[k] * I[k][i];
    return s;
  }
  double rho(int j) const {
    double s = 0.0;
    for (int k = 0; k < tau; ++k) s += q[k] * J[k][j];
    return s;
  }
  double q_down() const { return *std::min_element(q.begin(), q.end()); }
  double lambda_down() const {
    double s = lambda(0);
    for (int i = 1; i < l; ++i) s = std::min(s, lambda(i));
    return s;
  }
  double rho_down() const {
    double s = rho(0);
    for (int j = 1; j < r; ++j) s = std::min(s, rho(j));
    return s;
  }

  void validate() const {
    if (tau < 1 || l < 1 || r < 1) throw std::invalid_argument("cci: tau, l, r must be positive");
    if (alpha <= 0.0) throw std::invalid_argument("cci: alpha must be positive");
    if (static_cast<int>(q.size()) != tau) throw std::invalid_argument("cci: |q| != tau");
    double qs = 0.0;
    for (double x : q) {
      if (x < 0.0) throw std::invalid_argument("cci: negative type mass");
      qs += x;
    }
    if (std::abs(qs - 1.0) > 1e-9) throw std::invalid_argument("cci: q does not sum to 1");
    if (static_cast<int>(p.size()) != l) throw std::invalid_argument("cci: p row count != l");
    double ps = 0.0;
    for (const auto& row : p) {
      if (static_cast<int>(row.size()) != r) throw std::invalid_argument("cci: p column count != r");
      for (double x : row) {
        if (x < 0.0) throw std::invalid_argument("cci: negative channel mass");
        ps += x;
      }
    }
    if (std::abs(ps - 1.0) > 1e-9) throw std::invalid_argument("cci: p does not sum to 1");
    check_indicator(I, tau, l, "I");
    check_indicator(J, tau, r, "J");
    for (int i = 0; i < l; ++i)
      if (!(lambda(i) > 0.0))
        throw std::invalid_argument("cci: lambda_" + std::to_string(i + 1) + " = 0");
    for (int j = 0; j < r; ++j)
      if (!(rho(j) > 0.0))
        throw std::invalid_argument("cci: rho_" + std::to_string(j + 1) + " = 0");
  }

 private:
  static void check_indicator(const std::vector<std::vector<int>>& m, int rows, int cols,
                              const char* name) {
    if (static_cast<int>(m.size()) != rows)
      throw std::invalid_argument(std::string("cci: ") + name + " row count mismatch");
    for (const auto& row : m) {
      if (static_cast<int>(row.size()) != cols)
        throw std::invalid_argument(std::string("cci: ") + name + " column count mismatch");
      for (int x : row)
        if (x != 0 && x != 1)
          throw std::invalid_argument(std::string("cci: ") + name + " entries must be 0/1");
    }
  }
};

struct DegenerateRealizationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::vector<int> sample_cci_types(const CciParameters& params, int n, Rng& rng) {
  DiscreteSampler sampler(params.q);
  std::vector<int> types(n);
  for (int v = 0; v < n; ++v) types[v] = sampler.draw(rng);
  return types;
}

struct CciChannelCounts {
  std::vector<long> L;  // size l
  std::vector<long> R;  // size r
};

inline CciChannelCounts cci_channel_counts(const CciParameters& params,
                                           const std::vector<int>& types) {
  CciChannelCounts counts{std::vector<long>(params.l, 0), std::vector<long>(params.r, 0)};
  for (int t : types) {
    for (int i = 0; i < params.l; ++i) counts.L[i] += params.I[t][i];
    for (int j = 0; j < params.r; ++j) counts.R[j] += params.J[t][j];
  }
  return counts;
}

// The mass routed from type t to type s through all channels; multiplying by
// nothing else gives mu((v,t),(w,s)) for any vertices of those types.
inline double cci_type_pair_mass(const CciParameters& params, const CciChannelCounts& counts,
                                 int t, int s) {
  double mass = 0.0;
  for (int i = 0; i < params.l; ++i) {
    if (!params.I[t][i] || counts.L[i] == 0) continue;
    for (int j = 0; j < params.r; ++j) {
      if (!params.J[s][j] || counts.R[j] == 0) continue;
      mass += params.p[i][j] / (static_cast<double>(counts.L[i]) * counts.R[j]);
    }
  }
  return mass;
}

// Off-diagonal CCI masses per ordered pair, before any renormalization. The
// full sum including self-pairs is 1; excluding them leaves a deficit.
inline std::vector<double> cci_mass_raw(const CciParameters& params,
                                        const std::vector<int>& types) {
  const int n = static_cast<int>(types.size());
  const CciChannelCounts counts = cci_channel_counts(params, types);
  for (int i = 0; i < params.l; ++i)
    if (counts.L[i] == 0)
      throw DegenerateRealizationError("cci: L_" + std::to_string(i + 1) +
                                       " = 0 on this realization");
  for (int j = 0; j < params.r; ++j)
    if (counts.R[j] == 0)
      throw DegenerateRealizationError("cci: R_" + std::to_string(j + 1) +
                                       " = 0 on this realization");
  // cache per type pair
  std::vector<double> type_mass(static_cast<std::size_t>(params.tau) * params.tau);
  for (int t = 0; t < params.tau; ++t)
    for (int s = 0; s < params.tau; ++s)
      type_mass[static_cast<std::size_t>(t) * params.tau + s] =
          cci_type_pair_mass(params, counts, t, s);
  const PairIndex index(n);
  std::vector<double> out(PairIndex::ordered_count(n));
  for (int idx = 0; idx < static_cast<int>(out.size()); ++idx) {
    auto [v, w] = index.ordered_at(idx);
    out[idx] = type_mass[static_cast<std::size_t>(types[v - 1]) * params.tau + types[w - 1]];
  }
  return out;
}

// Simple (di)graphs carry no self-loops, so self-pair mass is dropped; by
// default the remainder is renormalized to a proper mass function.
inline EdgeMassFn cci_mass(const CciParameters& params, const std::vector<int>& types,
                           bool renormalize = true) {
  std::vector<double> values = cci_mass_raw(params, types);
  if (renormalize) {
    double total = 0.0;
    for (double x : values) total += x;
    if (total <= 0.0) throw DegenerateRealizationError("cci: no off-diagonal mass");
    for (double& x : values) x /= total;
    return EdgeMassFn(static_cast<int>(types.size()), EdgeMassFn::Domain::ordered,
                      std::move(values));
  }
  return EdgeMassFn(static_cast<int>(types.size()), EdgeMassFn::Domain::ordered,
                    std::move(values), /*strict=*/false);
}

// kappa(t,s) = alpha * sum_{i,j} p_ij I(t,i) J(s,j) / (lambda_i rho_j)
inline std::vector<std::vector<double>> cci_kernel(const CciParameters& params) {
  params.validate();
  std::vector<std::vector<double>> kernel(params.tau, std::vector<double>(params.tau, 0.0));
  for (int t = 0; t < params.tau; ++t)
    for (int s = 0; s < params.tau; ++s) {
      double acc = 0.0;
      for (int i = 0; i < params.l; ++i) {
        if (!params.I[t][i]) continue;
        for (int j = 0; j < params.r; ++j) {
          if (!params.J[s][j]) continue;
          acc += params.p[i][j] / (params.lambda(i) * params.rho(j));
        }
      }
      kernel[t][s] = params.alpha * acc;
    }
  return kernel;
}

// ---------------------------------------------------------------------------
// Kernel and geometric probability functions
// ---------------------------------------------------------------------------

// pi((k,t),(l,s)) = (kappa(t,s)/n) ∧ 1
inline EdgeProbabilityFn irg_probability(const std::vector<std::vector<double>>& kernel,
                                         const std::vector<int>& types, int scale_n) {
  const int n = static_cast<int>(types.size());
  const PairIndex index(n);
  std::vector<double> values(PairIndex::ordered_count(n));
  bool symmetric = true;
  for (int idx = 0; idx < static_cast<int>(values.size()); ++idx) {
    auto [v, w] = index.ordered_at(idx);
    const double kappa = kernel.at(types[v - 1]).at(types[w - 1]);
    if (kappa < 0.0) throw std::invalid_argument("irg_probability: negative kernel");
    values[idx] = std::min(kappa / scale_n, 1.0);
  }
  for (std::size_t u = 0; u + 1 < values.size(); u += 2)
    if (values[u] != values[u + 1]) {
      symmetric = false;
      break;
    }
  return EdgeProbabilityFn(n, std::move(values), symmetric);
}

struct GirgWeightLaw {
  enum class Kind { constant, pareto } kind = Kind::constant;
  double param = 1.0;  // constant weight, or pareto tail exponent (minimum 1)
};

struct GirgParams {
  double alpha = 1.0;
  double lambda = 1.0;
  int dim = 1;
  GirgWeightLaw weights;

  void validate() const {
    if (!(alpha > 0.0) || !(lambda > 0.0) || dim < 1)
      throw std::invalid_argument("girg: alpha, lambda must be positive and dim >= 1");
    if (weights.kind == GirgWeightLaw::Kind::constant && !(weights.param > 0.0))
      throw std::invalid_argument("girg: constant weight must be positive");
    if (weights.kind == GirgWeightLaw::Kind::pareto && !(weights.param > 1.0))
      throw std::invalid_argument("girg: pareto exponent must exceed 1");
  }
};

inline double torus_distance(const std::vector<double>& x, const std::vector<double>& y) {
  double best = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = std::abs(x[i] - y[i]);
    best = std::max(best, std::min(d, 1.0 - d));
  }
  return best;
}

inline std::vector<GirgVertex> sample_girg_vertices(const GirgParams& params, int n, Rng& rng) {
  std::vector<GirgVertex> out(n);
  for (auto& v : out) {
    v.position.resize(params.dim);
    for (double& c : v.position) c = rng.next_double();
    if (params.weights.kind == GirgWeightLaw::Kind::constant) {
      v.weight = params.weights.param;
    } else {
      // Pareto with minimum 1: w = u^{-1/(exponent-1)}
      v.weight = std::pow(1.0 - rng.next_double(), -1.0 / (params.weights.param - 1.0));
    }
  }
  return out;
}

// pi = (dist^{-alpha d} (vw / (n lambda))^alpha) ∧ 1; coincident positions get 1.
inline EdgeProbabilityFn girg_probability(const GirgParams& params,
                                          const std::vector<GirgVertex>& vertices) {
  params.validate();
  const int n = static_cast<int>(vertices.size());
  const PairIndex index(n);
  std::vector<double> values(PairIndex::ordered_count(n));
  for (int u = 0; u < PairIndex::unordered_count(n); ++u) {
    auto [v, w] = index.unordered_at(u);
    const GirgVertex& a = vertices[v - 1];
    const GirgVertex& b = vertices[w - 1];
    const double dist = torus_distance(a.position, b.position);
    double prob;
    if (dist == 0.0) {
      prob = 1.0;
    } else {
      prob = std::min(std::pow(dist, -params.alpha * params.dim) *
                          std::pow(a.weight * b.weight / (n * params.lambda), params.alpha),
                      1.0);
    }
    values[2 * u] = values[2 * u + 1] = prob;
  }
  return EdgeProbabilityFn(n, std::move(values), true);
}

// ---------------------------------------------------------------------------
// Model specifications
// ---------------------------------------------------------------------------

enum class ModelClass { IAG, IEG, ASRG, ESRG };
enum class ModelInstance {
  gilbert,
  directed_gilbert,
  irg,
  ird,
  girg,
  classical_er,
  directed_classical_er,
  cci,
  custom
};

inline bool is_directed(ModelClass c) { return c == ModelClass::IAG || c == ModelClass::ASRG; }
inline bool is_independent(ModelClass c) { return c == ModelClass::IAG || c == ModelClass::IEG; }

inline std::string to_string(ModelClass c) {
  switch (c) {
    case ModelClass::IAG: return "IAG";
    case ModelClass::IEG: return "IEG";
    case ModelClass::ASRG: return "ASRG";
    case ModelClass::ESRG: return "ESRG";
  }
  return "";
}

inline std::string to_string(ModelInstance i) {
  switch (i) {
    case ModelInstance::gilbert: return "gilbert";
    case ModelInstance::directed_gilbert: return "directed-gilbert";
    case ModelInstance::irg: return "irg";
    case ModelInstance::ird: return "ird";
    case ModelInstance::girg: return "girg";
    case ModelInstance::classical_er: return "classical-er";
    case ModelInstance::directed_classical_er: return "directed-classical-er";
    case ModelInstance::cci: return "cci";
    case ModelInstance::custom: return "custom";
  }
  return "";
}

struct GilbertParams {
  double p = 0.0;
};
struct IrgParams {
  std::vector<double> type_pmf;
  std::vector<std::vector<double>> kernel;
};
struct SelectionCountParams {
  int m = 0;
};
struct CustomProbabilityParams {
  std::vector<std::vector<double>> pi;  // n x n, diagonal ignored
};
struct CustomMassParams {
  std::vector<std::vector<double>> mu;  // n x n, diagonal ignored
  int m = 0;
};

using ModelParams = std::variant<GilbertParams, IrgParams, GirgParams, SelectionCountParams,
                                 CustomProbabilityParams, CustomMassParams, CciParameters>;

struct ModelSpec {
  ModelClass model_class = ModelClass::IEG;
  ModelInstance instance = ModelInstance::gilbert;
  int n = 1;
  ModelParams params;

  bool directed() const { return is_directed(model_class); }
  bool independent() const { return is_independent(model_class); }

  void validate() const {
    if (n < 1) throw std::invalid_argument("spec: n must be positive");
    switch (instance) {
      case ModelInstance::gilbert: require_class(ModelClass::IEG); break;
      case ModelInstance::directed_gilbert: require_class(ModelClass::IAG); break;
      case ModelInstance::irg: require_class(ModelClass::IEG); break;
      case ModelInstance::ird: require_class(ModelClass::IAG); break;
      case ModelInstance::girg:
        if (!independent()) throw std::invalid_argument("spec: girg requires IEG or IAG");
        break;
      case ModelInstance::classical_er: require_class(ModelClass::ESRG); break;
      case ModelInstance::directed_classical_er: require_class(ModelClass::ASRG); break;
      case ModelInstance::cci: require_class(ModelClass::ASRG); break;
      case ModelInstance::custom: break;
    }
    std::visit([this](const auto& p) { validate_params(p); }, params);
  }

 private:
  void require_class(ModelClass c) const {
    if (model_class != c)
      throw std::invalid_argument("spec: instance '" + undirectify::to_string(instance) +
                                  "' requires class " + undirectify::to_string(c));
  }

  void validate_params(const GilbertParams& p) const {
    if (!(p.p >= 0.0 && p.p <= 1.0)) throw std::invalid_argument("spec: p outside [0,1]");
  }
  void validate_params(const IrgParams& p) const {
    if (p.type_pmf.empty()) throw std::invalid_argument("spec: irg type pmf empty");
    double total = 0.0;
    for (double x : p.type_pmf) {
      if (x < 0.0) throw std::invalid_argument("spec: irg type pmf negative");
      total += x;
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw std::invalid_argument("spec: irg type pmf does not sum to 1");
    const std::size_t tau = p.type_pmf.size();
    if (p.kernel.size() != tau) throw std::invalid_argument("spec: kernel row count mismatch");
    for (const auto& row : p.kernel) {
      if (row.size() != tau) throw std::invalid_argument("spec: kernel column count mismatch");
      for (double x : row)
        if (x < 0.0) throw std::invalid_argument("spec: kernel must be nonnegative");
    }
    if (model_class == ModelClass::IEG) {
      for (std::size_t a = 0; a < tau; ++a)
        for (std::size_t b = a + 1; b < tau; ++b)
          if (p.kernel[a][b] != p.kernel[b][a])
            throw std::invalid_argument("spec: IEG requires a symmetric kernel");
    }
  }
  void validate_params(const GirgParams& p) const { p.validate(); }
  void validate_params(const SelectionCountParams& p) const {
    if (p.m < 0) throw std::invalid_argument("spec: m must be nonnegative");
    const long cap = directed() ? PairIndex::ordered_count(n) : PairIndex::unordered_count(n);
    if (p.m > cap) throw std::invalid_argument("spec: m exceeds pair count");
  }
  void validate_params(const CustomProbabilityParams& p) const {
    if (!independent()) throw std::invalid_argument("spec: probability params require IAG/IEG");
    check_square(p.pi, "pi");
    for (int v = 0; v < n; ++v)
      for (int w = 0; w < n; ++w)
        if (v != w && !(p.pi[v][w] >= 0.0 && p.pi[v][w] <= 1.0))
          throw std::invalid_argument("spec: pi entry outside [0,1]");
    if (model_class == ModelClass::IEG) {
      for (int v = 0; v < n; ++v)
        for (int w = v + 1; w < n; ++w)
          if (p.pi[v][w] != p.pi[w][v])
            throw std::invalid_argument("spec: IEG requires symmetric pi");
    }
  }
  void validate_params(const CustomMassParams& p) const {
    if (independent()) throw std::invalid_argument("spec: mass params require ASRG/ESRG");
    check_square(p.mu, "mu");
    if (p.m < 0) throw std::invalid_argument("spec: m must be nonnegative");
    if (model_class == ModelClass::ESRG) {
      for (int v = 0; v < n; ++v)
        for (int w = v + 1; w < n; ++w)
          if (p.mu[v][w] != p.mu[w][v])
            throw std::invalid_argument("spec: ESRG requires symmetric mu");
    }
  }
  void validate_params(const CciParameters& p) const {
    if (model_class != ModelClass::ASRG) throw std::invalid_argument("spec: cci requires ASRG");
    p.validate();
  }

  void check_square(const std::vector<std::vector<double>>& m, const char* name) const {
    if (static_cast<int>(m.size()) != n)
      throw std::invalid_argument(std::string("spec: ") + name + " must be n x n");
    for (const auto& row : m)
      if (static_cast<int>(row.size()) != n)
        throw std::invalid_argument(std::string("spec: ") + name + " must be n x n");
  }
};

// ---------------------------------------------------------------------------
// Realization: vertex types plus the induced pair function
// ---------------------------------------------------------------------------

struct RealizedIndependentModel {
  TypedVertexVector vertices;
  EdgeProbabilityFn pi;
};

struct RealizedSelectionModel {
  TypedVertexVector vertices;
  EdgeMassFn mu;
  int m = 0;
};

namespace detail {

inline TypedVertexVector untyped_vertices(int n, std::uint64_t seed) {
  TypedVertexVector v{n, std::vector<VertexType>(n, std::monostate{}), seed};
  return v;
}

inline EdgeProbabilityFn matrix_probability(int n, const std::vector<std::vector<double>>& pi,
                                            bool symmetric) {
  const PairIndex index(n);
  std::vector<double> values(PairIndex::ordered_count(n));
  for (int idx = 0; idx < static_cast<int>(values.size()); ++idx) {
    auto [v, w] = index.ordered_at(idx);
    values[idx] = pi[v - 1][w - 1];
  }
  return EdgeProbabilityFn(n, std::move(values), symmetric);
}

inline EdgeMassFn matrix_mass(int n, const std::vector<std::vector<double>>& mu,
                              EdgeMassFn::Domain domain) {
  const PairIndex index(n);
  if (domain == EdgeMassFn::Domain::ordered) {
    std::vector<double> values(PairIndex::ordered_count(n));
    for (int idx = 0; idx < static_cast<int>(values.size()); ++idx) {
      auto [v, w] = index.ordered_at(idx);
      values[idx] = mu[v - 1][w - 1];
    }
    return EdgeMassFn(n, domain, std::move(values));
  }
  std::vector<double> values(PairIndex::unordered_count(n));
  for (int idx = 0; idx < static_cast<int>(values.size()); ++idx) {
    auto [v, w] = index.unordered_at(idx);
    values[idx] = mu[v - 1][w - 1];
  }
  return EdgeMassFn(n, domain, std::move(values));
}

}  // namespace detail

inline RealizedIndependentModel realize_independent(const ModelSpec& spec, Rng& rng) {
  spec.validate();
  if (!spec.independent())
    throw std::invalid_argument("realize_independent: spec is a selection model");
  const int n = spec.n;
  const bool symmetric = spec.model_class == ModelClass::IEG;
  if (const auto* g = std::get_if<GilbertParams>(&spec.params)) {
    return {detail::untyped_vertices(n, rng.seed()),
            EdgeProbabilityFn::constant(n, g->p, symmetric)};
  }
  if (const auto* p = std::get_if<IrgParams>(&spec.params)) {
    DiscreteSampler sampler(p->type_pmf);
    std::vector<int> types(n);
    TypedVertexVector vertices{n, {}, rng.seed()};
    vertices.types.reserve(n);
    for (int v = 0; v < n; ++v) {
      types[v] = sampler.draw(rng);
      vertices.types.emplace_back(types[v]);
    }
    return {std::move(vertices), irg_probability(p->kernel, types, n)};
  }
  if (const auto* g = std::get_if<GirgParams>(&spec.params)) {
    auto girg_vertices = sample_girg_vertices(*g, n, rng);
    TypedVertexVector vertices{n, {}, rng.seed()};
    vertices.types.reserve(n);
    for (const auto& gv : girg_vertices) vertices.types.emplace_back(gv);
    return {std::move(vertices), girg_probability(*g, girg_vertices)};
  }
  if (const auto* c = std::get_if<CustomProbabilityParams>(&spec.params)) {
    return {detail::untyped_vertices(n, rng.seed()),
            detail::matrix_probability(n, c->pi, symmetric)};
  }
  throw std::invalid_argument("realize_independent: unsupported parameter set");
}

inline RealizedSelectionModel realize_selection(const ModelSpec& spec, Rng& rng) {
  spec.validate();
  if (spec.independent())
    throw std::invalid_argument("realize_selection: spec is an independent model");
  const int n = spec.n;
  const auto domain = spec.directed() ? EdgeMassFn::Domain::ordered
                                      : EdgeMassFn::Domain::unordered;
  if (const auto* s = std::get_if<SelectionCountParams>(&spec.params)) {
    return {detail::untyped_vertices(n, rng.seed()), EdgeMassFn::uniform(n, domain), s->m};
  }
  if (const auto* c = std::get_if<CustomMassParams>(&spec.params)) {
    return {detail::untyped_vertices(n, rng.seed()), detail::matrix_mass(n, c->mu, domain), c->m};
  }
  if (const auto* c = std::get_if<CciParameters>(&spec.params)) {
    c->validate();
    std::vector<int> types = sample_cci_types(*c, n, rng);
    TypedVertexVector vertices{n, {}, rng.seed()};
    vertices.types.reserve(n);
    for (int t : types) vertices.types.emplace_back(t);
    const int m = static_cast<int>(std::floor(c->alpha * n));
    return {std::move(vertices), cci_mass(*c, types), m};
  }
  throw std::invalid_argument("realize_selection: unsupported parameter set");
}

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

inline Graph sample_ieg(const EdgeProbabilityFn& pi, Rng& rng) {
  if (!pi.symmetric()) throw std::invalid_argument("sample_ieg: pi must be symmetric");
  const int n = pi.n();
  const int pairs = PairIndex::unordered_count(n);
  std::vector<std::pair<int, int>> edges;
  const PairIndex index(n);
  for (int u = 0; u < pairs; ++u)
    if (rng.bernoulli(pi.at_ordered(2 * u))) edges.push_back(index.unordered_at(u));
  return Graph(n, edges);
}

inline Digraph sample_iag(const EdgeProbabilityFn& pi, Rng& rng) {
  const int n = pi.n();
  const int total = PairIndex::ordered_count(n);
  std::vector<std::pair<int, int>> arcs;
  const PairIndex index(n);
  for (int idx = 0; idx < total; ++idx)
    if (rng.bernoulli(pi.at_ordered(idx))) arcs.push_back(index.ordered_at(idx));
  return Digraph(n, arcs);
}

struct RejectionCapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

// Repeatedly draw locations from `mass` until one outside `present` appears.
inline int draw_new_location(const DiscreteSampler& sampler, const std::vector<char>& present,
                             Rng& rng, long cap) {
  for (long iter = 0; iter < cap; ++iter) {
    const int loc = sampler.draw(rng);
    if (!present[loc]) return loc;
  }
  throw RejectionCapError("selection sampler: rejection iteration cap exceeded");
}

inline void check_selection_feasible(const EdgeMassFn& mu, int m) {
  if (m < 0) throw std::invalid_argument("selection sampler: m must be nonnegative");
  if (m > mu.positive_count())
    throw std::invalid_argument("selection sampler: m=" + std::to_string(m) +
                                " exceeds positive-mass pair count " +
                                std::to_string(mu.positive_count()));
}

}  // namespace detail

inline Graph sample_esrg(const EdgeMassFn& mu, int m, Rng& rng,
                         long cap = kRejectionIterationCap) {
  if (mu.domain() != EdgeMassFn::Domain::unordered)
    throw std::invalid_argument("sample_esrg: mu must live on unordered pairs");
  detail::check_selection_feasible(mu, m);
  const int n = mu.n();
  DiscreteSampler sampler(mu.values());
  std::vector<char> present(mu.values().size(), 0);
  std::vector<std::pair<int, int>> edges;
  const PairIndex index(n);
  for (int placed = 0; placed < m; ++placed) {
    const int loc = detail::draw_new_location(sampler, present, rng, cap);
    present[loc] = 1;
    edges.push_back(index.unordered_at(loc));
  }
  return Graph(n, edges);
}

inline Digraph sample_asrg(const EdgeMassFn& mu, int m, Rng& rng,
                           long cap = kRejectionIterationCap) {
  if (mu.domain() != EdgeMassFn::Domain::ordered)
    throw std::invalid_argument("sample_asrg: mu must live on ordered pairs");
  detail::check_selection_feasible(mu, m);
  const int n = mu.n();
  DiscreteSampler sampler(mu.values());
  std::vector<char> present(mu.values().size(), 0);
  std::vector<std::pair<int, int>> arcs;
  const PairIndex index(n);
  for (int placed = 0; placed < m; ++placed) {
    const int loc = detail::draw_new_location(sampler, present, rng, cap);
    present[loc] = 1;
    arcs.push_back(index.ordered_at(loc));
  }
  return Digraph(n, arcs);
}

// Spec-level samplers: realize the vertex vector, then the edges/arcs.
inline Graph sample_graph(const ModelSpec& spec, Rng& rng) {
  if (spec.directed()) throw std::invalid_argument("sample_graph: spec is directed");
  if (spec.independent()) {
    auto realized = realize_independent(spec, rng);
    return sample_ieg(realized.pi, rng);
  }
  auto realized = realize_selection(spec, rng);
  return sample_esrg(realized.mu, realized.m, rng);
}

inline Digraph sample_digraph(const ModelSpec& spec, Rng& rng) {
  if (!spec.directed()) throw std::invalid_argument("sample_digraph: spec is undirected");
  if (spec.independent()) {
    auto realized = realize_independent(spec, rng);
    return sample_iag(realized.pi, rng);
  }
  auto realized = realize_selection(spec, rng);
  return sample_asrg(realized.mu, realized.m, rng);
}

// ---------------------------------------------------------------------------
// Exact distributions
// ---------------------------------------------------------------------------

inline GraphDistribution exact_ieg_distribution(const EdgeProbabilityFn& pi) {
  if (!pi.symmetric()) throw std::invalid_argument("exact_ieg_distribution: pi must be symmetric");
  const int n = pi.n();
  GraphDistribution out(n, GraphKind::graph);
  const int pairs = PairIndex::unordered_count(n);
  const std::uint64_t total = graph_code_count(n);
  for (std::uint64_t code = 0; code < total; ++code) {
    long double mass = 1.0L;
    for (int u = 0; u < pairs; ++u) {
      const double p = pi.at_ordered(2 * u);
      mass *= ((code >> u) & 1u) ? p : (1.0 - p);
    }
    out.set_mass(code, static_cast<double>(mass));
  }
  return out;
}

inline GraphDistribution exact_iag_distribution(const EdgeProbabilityFn& pi) {
  const int n = pi.n();
  GraphDistribution out(n, GraphKind::digraph);
  const int pairs = PairIndex::unordered_count(n);
  const std::uint64_t total = digraph_code_count(n);
  for (std::uint64_t code = 0; code < total; ++code) {
    long double mass = 1.0L;
    for (int u = 0; u < pairs; ++u) {
      const double a = pi.at_ordered(2 * u);      // forward arc probability
      const double b = pi.at_ordered(2 * u + 1);  // reverse arc probability
      switch ((code >> (2 * u)) & 3u) {
        case 0: mass *= (1.0 - a) * (1.0 - b); break;
        case 1: mass *= a * (1.0 - b); break;
        case 2: mass *= (1.0 - a) * b; break;
        case 3: mass *= a * b; break;
      }
    }
    out.set_mass(code, static_cast<double>(mass));
  }
  return out;
}

struct ExactDistributionResult {
  GraphDistribution dist;
  bool conditioned_on_types = false;
  TypedVertexVector vertices;
};

// Exact pmf of the model; typed models are conditioned on the vertex vector
// realized from `seed` and flagged as such.
inline ExactDistributionResult exact_model_distribution(const ModelSpec& spec, std::uint64_t seed,
                                                        int m_cap = kSelectionExactMCap) {
  spec.validate();
  Rng rng(seed);
  if (spec.independent()) {
    auto realized = realize_independent(spec, rng);
    const bool typed = spec.instance == ModelInstance::irg ||
                       spec.instance == ModelInstance::ird ||
                       spec.instance == ModelInstance::girg;
    GraphDistribution dist = spec.directed() ? exact_iag_distribution(realized.pi)
                                             : exact_ieg_distribution(realized.pi);
    return {std::move(dist), typed, std::move(realized.vertices)};
  }
  auto realized = realize_selection(spec, rng);
  if (realized.m > m_cap)
    throw std::invalid_argument("exact_model_distribution: m=" + std::to_string(realized.m) +
                                " exceeds order-sum cap " + std::to_string(m_cap));
  const bool typed = spec.instance == ModelInstance::cci;
  if (spec.directed()) {
    GraphDistribution dist =
        asrg_exact_distribution_oracle(spec.n, realized.mu.values(), realized.m);
    return {std::move(dist), typed, std::move(realized.vertices)};
  }
  GraphDistribution dist =
      esrg_exact_distribution_oracle(spec.n, realized.mu.values(), realized.m);
  return {std::move(dist), typed, std::move(realized.vertices)};
}

}  // namespace undirectify
