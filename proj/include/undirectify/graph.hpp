#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace undirectify {

// Vertices are labeled 1..n throughout. An unordered pair {v,w} is indexed by
// its lexicographic rank over (min,max); an ordered pair (v,w) gets index
// 2*unordered + direction bit. Both indexings are stable for fixed n.
class PairIndex {
 public:
  explicit PairIndex(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("PairIndex: n must be positive");
    pairs_.reserve(unordered_count(n));
    for (int v = 1; v <= n; ++v)
      for (int w = v + 1; w <= n; ++w) pairs_.emplace_back(v, w);
  }

  static int unordered_count(int n) { return n * (n - 1) / 2; }
  static int ordered_count(int n) { return n * (n - 1); }

  int n() const { return n_; }

  int unordered(int v, int w) const {
    check_pair(v, w);
    if (v > w) std::swap(v, w);
    return (v - 1) * n_ - (v - 1) * v / 2 + (w - v - 1);
  }

  // direction bit: 0 for (min,max), 1 for (max,min)
  int ordered(int v, int w) const { return 2 * unordered(v, w) + (v > w ? 1 : 0); }

  std::pair<int, int> unordered_at(int index) const { return pairs_.at(index); }

  std::pair<int, int> ordered_at(int index) const {
    auto [v, w] = pairs_.at(index / 2);
    return (index % 2 == 0) ? std::pair{v, w} : std::pair{w, v};
  }

 private:
  void check_pair(int v, int w) const {
    if (v < 1 || w < 1 || v > n_ || w > n_ || v == w)
      throw std::invalid_argument("PairIndex: invalid vertex pair (" + std::to_string(v) +
                                  "," + std::to_string(w) + ") for n=" + std::to_string(n_));
  }

  int n_;
  std::vector<std::pair<int, int>> pairs_;
};

namespace detail {

// flat bitset over pair indices
class Bits {
 public:
  Bits() = default;
  explicit Bits(int size) : size_(size), words_((size + 63) / 64, 0) {}
  bool get(int i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(int i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void clear(int i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  int count() const {
    int c = 0;
    for (std::uint64_t w : words_) c += __builtin_popcountll(w);
    return c;
  }
  bool subset_of(const Bits& other) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~other.words_[i]) return false;
    return true;
  }
  bool operator==(const Bits& o) const { return size_ == o.size_ && words_ == o.words_; }
  int size() const { return size_; }

 private:
  int size_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace detail

class Digraph;

// Labeled simple graph on [n]; immutable after construction.
class Graph {
 public:
  explicit Graph(int n) : index_(n), bits_(PairIndex::unordered_count(n)) {}

  Graph(int n, const std::vector<std::pair<int, int>>& edges) : Graph(n) {
    for (auto [v, w] : edges) {
      const int i = index_.unordered(v, w);
      if (bits_.get(i))
        throw std::invalid_argument("Graph: duplicate edge");
      bits_.set(i);
      ++edge_count_;
    }
  }

  int vertex_count() const { return index_.n(); }
  int edge_count() const { return edge_count_; }
  const PairIndex& pair_index() const { return index_; }

  bool has_edge(int v, int w) const { return bits_.get(index_.unordered(v, w)); }
  bool has_edge_at(int unordered_index) const { return bits_.get(unordered_index); }

  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(edge_count_);
    const int total = PairIndex::unordered_count(index_.n());
    for (int i = 0; i < total; ++i)
      if (bits_.get(i)) out.push_back(index_.unordered_at(i));
    return out;
  }

  bool is_subgraph_of(const Graph& other) const {
    return vertex_count() == other.vertex_count() && bits_.subset_of(other.bits_);
  }

  bool operator==(const Graph& o) const {
    return vertex_count() == o.vertex_count() && bits_ == o.bits_;
  }

  // canonical bitmask; requires C(n,2) <= 64
  std::uint64_t encode() const {
    const int total = PairIndex::unordered_count(index_.n());
    if (total > 64) throw std::domain_error("Graph::encode: n too large for 64-bit code");
    std::uint64_t code = 0;
    for (int i = 0; i < total; ++i)
      if (bits_.get(i)) code |= std::uint64_t{1} << i;
    return code;
  }

  static Graph decode(std::uint64_t code, int n) {
    const int total = PairIndex::unordered_count(n);
    if (total > 64) throw std::domain_error("Graph::decode: n too large for 64-bit code");
    if (total < 64 && (code >> total) != 0)
      throw std::invalid_argument("Graph::decode: code out of range");
    Graph g(n);
    for (int i = 0; i < total; ++i)
      if ((code >> i) & 1u) {
        g.bits_.set(i);
        ++g.edge_count_;
      }
    return g;
  }

 private:
  friend class Digraph;
  friend Graph forgetful_map(const Digraph&);
  friend Graph perturb_graph(const Graph&, const std::vector<std::pair<int, int>>&,
                             const std::vector<std::pair<int, int>>&);

  PairIndex index_;
  detail::Bits bits_;
  int edge_count_ = 0;
};

// Labeled simple digraph on [n]; both (v,w) and (w,v) may be present.
class Digraph {
 public:
  explicit Digraph(int n) : index_(n), bits_(PairIndex::ordered_count(n)) {}

  Digraph(int n, const std::vector<std::pair<int, int>>& arcs) : Digraph(n) {
    for (auto [v, w] : arcs) {
      const int i = index_.ordered(v, w);
      if (bits_.get(i))
        throw std::invalid_argument("Digraph: duplicate arc");
      bits_.set(i);
      ++arc_count_;
    }
  }

  int vertex_count() const { return index_.n(); }
  int arc_count() const { return arc_count_; }
  const PairIndex& pair_index() const { return index_; }

  bool has_arc(int v, int w) const { return bits_.get(index_.ordered(v, w)); }
  bool has_arc_at(int ordered_index) const { return bits_.get(ordered_index); }
  bool location_occupied(int v, int w) const { return has_arc(v, w) || has_arc(w, v); }

  std::vector<std::pair<int, int>> arcs() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(arc_count_);
    const int total = PairIndex::ordered_count(index_.n());
    for (int i = 0; i < total; ++i)
      if (bits_.get(i)) out.push_back(index_.ordered_at(i));
    return out;
  }

  bool is_subgraph_of(const Digraph& other) const {
    return vertex_count() == other.vertex_count() && bits_.subset_of(other.bits_);
  }

  bool operator==(const Digraph& o) const {
    return vertex_count() == o.vertex_count() && bits_ == o.bits_;
  }

  // canonical code: base-4 digit per unordered pair, little-endian in the
  // pair index (0 none, 1 forward (min,max), 2 reverse, 3 bidirectional);
  // requires C(n,2) <= 32
  std::uint64_t encode() const {
    const int pairs = PairIndex::unordered_count(index_.n());
    if (pairs > 32) throw std::domain_error("Digraph::encode: n too large for 64-bit code");
    std::uint64_t code = 0;
    for (int u = 0; u < pairs; ++u) {
      std::uint64_t digit = 0;
      if (bits_.get(2 * u)) digit |= 1;
      if (bits_.get(2 * u + 1)) digit |= 2;
      code |= digit << (2 * u);
    }
    return code;
  }

  static Digraph decode(std::uint64_t code, int n) {
    const int pairs = PairIndex::unordered_count(n);
    if (pairs > 32) throw std::domain_error("Digraph::decode: n too large for 64-bit code");
    if (2 * pairs < 64 && (code >> (2 * pairs)) != 0)
      throw std::invalid_argument("Digraph::decode: code out of range");
    Digraph d(n);
    for (int u = 0; u < pairs; ++u) {
      const std::uint64_t digit = (code >> (2 * u)) & 3u;
      if (digit & 1) {
        d.bits_.set(2 * u);
        ++d.arc_count_;
      }
      if (digit & 2) {
        d.bits_.set(2 * u + 1);
        ++d.arc_count_;
      }
    }
    return d;
  }

 private:
  PairIndex index_;
  detail::Bits bits_;
  int arc_count_ = 0;
};

// Drops arc directions: {v,w} is an edge iff (v,w) or (w,v) is an arc.
inline Graph forgetful_map(const Digraph& d) {
  const int n = d.vertex_count();
  Graph g(n);
  const int pairs = PairIndex::unordered_count(n);
  for (int u = 0; u < pairs; ++u) {
    if (d.has_arc_at(2 * u) || d.has_arc_at(2 * u + 1)) {
      g.bits_.set(u);
      ++g.edge_count_;
    }
  }
  return g;
}

// Number of digraphs mapping onto g: each occupied location carries one of
// three arc states. 3^41 no longer fits in 64 bits.
inline std::uint64_t forgetful_preimage_size(const Graph& g) {
  if (g.edge_count() > 40)
    throw std::domain_error("forgetful_preimage_size: 3^" + std::to_string(g.edge_count()) +
                            " overflows 64 bits");
  std::uint64_t result = 1;
  for (int e = 0; e < g.edge_count(); ++e) result *= 3;
  return result;
}

inline constexpr int kMaxEnumerationGraphN = 6;
inline constexpr int kMaxEnumerationDigraphN = 5;

template <class Fn>
void enumerate_graphs(int n, Fn&& fn, int n_max = kMaxEnumerationGraphN) {
  if (n < 1 || n > n_max)
    throw std::invalid_argument("enumerate_graphs: n=" + std::to_string(n) +
                                " outside [1," + std::to_string(n_max) +
                                "]; 2^C(n,2) graphs would be enumerated");
  const std::uint64_t total = std::uint64_t{1} << PairIndex::unordered_count(n);
  for (std::uint64_t code = 0; code < total; ++code) fn(Graph::decode(code, n));
}

template <class Fn>
void enumerate_digraphs(int n, Fn&& fn, int n_max = kMaxEnumerationDigraphN) {
  if (n < 1 || n > n_max)
    throw std::invalid_argument("enumerate_digraphs: n=" + std::to_string(n) +
                                " outside [1," + std::to_string(n_max) +
                                "]; 4^C(n,2) digraphs would be enumerated");
  const std::uint64_t total = std::uint64_t{1} << (2 * PairIndex::unordered_count(n));
  for (std::uint64_t code = 0; code < total; ++code) fn(Digraph::decode(code, n));
}

inline std::uint64_t graph_code_count(int n) {
  return std::uint64_t{1} << PairIndex::unordered_count(n);
}

inline std::uint64_t digraph_code_count(int n) {
  return std::uint64_t{1} << (2 * PairIndex::unordered_count(n));
}

// New graph with `add` inserted and `remove` deleted. Rejects additions of
// present edges and removals of absent ones.
inline Graph perturb_graph(const Graph& g, const std::vector<std::pair<int, int>>& add,
                           const std::vector<std::pair<int, int>>& remove) {
  Graph out = g;
  for (auto [v, w] : add) {
    const int i = out.index_.unordered(v, w);
    if (out.bits_.get(i)) throw std::invalid_argument("perturb_graph: edge to add already present");
    out.bits_.set(i);
    ++out.edge_count_;
  }
  for (auto [v, w] : remove) {
    const int i = out.index_.unordered(v, w);
    if (!out.bits_.get(i)) throw std::invalid_argument("perturb_graph: edge to remove not present");
    out.bits_.clear(i);
    --out.edge_count_;
  }
  return out;
}

}  // namespace undirectify
