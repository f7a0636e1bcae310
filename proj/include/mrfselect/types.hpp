#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace mrfselect {

// Error hierarchy. Everything thrown by the library derives from Error so
// callers can distinguish data problems from programming mistakes.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidSymbol : Error { using Error::Error; };
struct InvalidMargin : Error { using Error::Error; };
struct MarginMismatch : Error { using Error::Error; };
struct EnumerationTooLarge : Error { using Error::Error; };
struct PenaltyOverflow : Error { using Error::Error; };
struct ModelTooLarge : Error { using Error::Error; };
struct ZeroProbabilityCondition : Error { using Error::Error; };
struct SupportMismatch : Error { using Error::Error; };
struct MarkovIntersectionViolation : Error { using Error::Error; };
struct FormatError : Error { using Error::Error; };

/// Vertex count and alphabet size. Symbols are 0..alphabet_size-1;
/// vertices are 0-indexed internally and 1-indexed in all file formats.
struct ProblemDims {
  int d = 0;
  int alphabet_size = 0;

  ProblemDims() = default;
  ProblemDims(int d_, int alphabet_size_) : d(d_), alphabet_size(alphabet_size_) {
    if (d < 1) throw Error("ProblemDims: d must be >= 1");
    if (alphabet_size < 2) throw Error("ProblemDims: alphabet size must be >= 2");
    if (d > 64) throw Error("ProblemDims: d > 64 not supported");
  }

  bool operator==(const ProblemDims&) const = default;

  /// Number of unordered vertex pairs, i.e. edge slots.
  int edge_slots() const { return d * (d - 1) / 2; }
};

/// Bit position of edge (u,v), u < v, in lexicographic (u,v) order.
inline int edge_slot(int u, int v, int d) {
  if (u > v) std::swap(u, v);
  if (u == v || u < 0 || v >= d) throw Error("edge_slot: bad edge");
  return u * d - u * (u + 1) / 2 + (v - u - 1);
}

/// Simple undirected graph on {0..d-1}, stored as per-vertex neighbor
/// bitmasks. Value type: mutation returns a new graph.
class Graph {
 public:
  Graph() = default;
  explicit Graph(ProblemDims dims) : dims_(dims), nbmask_(static_cast<size_t>(dims.d), 0) {}

  static Graph empty(ProblemDims dims) { return Graph(dims); }

  static Graph complete(ProblemDims dims) {
    Graph g(dims);
    const std::uint64_t all = (dims.d == 64) ? ~0ull : ((1ull << dims.d) - 1);
    for (int v = 0; v < dims.d; ++v) g.nbmask_[v] = all & ~(1ull << v);
    return g;
  }

  /// Graph whose edge set is given by an edge bitmask (lexicographic slot
  /// order). Requires edge_slots() <= 64.
  static Graph from_edge_mask(ProblemDims dims, std::uint64_t mask) {
    if (dims.edge_slots() > 64) throw EnumerationTooLarge("edge mask needs more than 64 bits");
    Graph g(dims);
    for (int u = 0; u < dims.d; ++u)
      for (int v = u + 1; v < dims.d; ++v)
        if (mask >> edge_slot(u, v, dims.d) & 1) g.add_edge_inplace(u, v);
    return g;
  }

  const ProblemDims& dims() const { return dims_; }

  bool has_edge(int u, int v) const {
    check_vertex(u);
    check_vertex(v);
    return u != v && (nbmask_[u] >> v & 1);
  }

  std::uint64_t neighbor_mask(int v) const {
    check_vertex(v);
    return nbmask_[v];
  }

  std::vector<int> neighbors(int v) const {
    std::vector<int> out;
    std::uint64_t m = neighbor_mask(v);
    while (m) {
      int w = std::countr_zero(m);
      out.push_back(w);
      m &= m - 1;
    }
    return out;
  }

  int degree(int v) const { return std::popcount(neighbor_mask(v)); }

  int edge_count() const {
    int twice = 0;
    for (int v = 0; v < dims_.d; ++v) twice += std::popcount(nbmask_[v]);
    return twice / 2;
  }

  std::uint64_t edge_mask() const {
    if (dims_.edge_slots() > 64) throw EnumerationTooLarge("edge mask needs more than 64 bits");
    std::uint64_t mask = 0;
    for (int u = 0; u < dims_.d; ++u) {
      std::uint64_t m = nbmask_[u] >> (u + 1) << (u + 1);
      while (m) {
        int v = std::countr_zero(m);
        mask |= 1ull << edge_slot(u, v, dims_.d);
        m &= m - 1;
      }
    }
    return mask;
  }

  Graph with_edge_flipped(int u, int v) const {
    check_vertex(u);
    check_vertex(v);
    if (u == v) throw Error("Graph: self loop");
    Graph g = *this;
    g.nbmask_[u] ^= 1ull << v;
    g.nbmask_[v] ^= 1ull << u;
    return g;
  }

  Graph with_edge(int u, int v) const {
    return has_edge(u, v) ? *this : with_edge_flipped(u, v);
  }

  Graph without_edge(int u, int v) const {
    return has_edge(u, v) ? with_edge_flipped(u, v) : *this;
  }

  /// True if every edge of other also belongs to this graph.
  bool contains(const Graph& other) const {
    for (int v = 0; v < dims_.d; ++v)
      if (other.nbmask_[v] & ~nbmask_[v]) return false;
    return true;
  }

  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> out;
    for (int u = 0; u < dims_.d; ++u)
      for (int v = u + 1; v < dims_.d; ++v)
        if (nbmask_[u] >> v & 1) out.emplace_back(u, v);
    return out;
  }

  bool operator==(const Graph&) const = default;

 private:
  void add_edge_inplace(int u, int v) {
    nbmask_[u] |= 1ull << v;
    nbmask_[v] |= 1ull << u;
  }
  void check_vertex(int v) const {
    if (v < 0 || v >= dims_.d) throw Error("Graph: vertex out of range");
  }

  ProblemDims dims_;
  std::vector<std::uint64_t> nbmask_;
};

/// n observations of the d-vector, row i = time point i.
class Sample {
 public:
  Sample(ProblemDims dims, std::vector<std::uint8_t> data)
      : dims_(dims), data_(std::move(data)) {
    if (data_.empty() || data_.size() % static_cast<size_t>(dims_.d) != 0)
      throw Error("Sample: data size not a multiple of d");
    for (std::uint8_t s : data_)
      if (s >= dims_.alphabet_size)
        throw InvalidSymbol("Sample: symbol " + std::to_string(int(s)) + " out of range");
  }

  const ProblemDims& dims() const { return dims_; }
  std::size_t n() const { return data_.size() / static_cast<size_t>(dims_.d); }

  int at(std::size_t i, int v) const { return data_[i * dims_.d + v]; }

  const std::uint8_t* row(std::size_t i) const { return data_.data() + i * dims_.d; }

  const std::vector<std::uint8_t>& raw() const { return data_; }

 private:
  ProblemDims dims_;
  std::vector<std::uint8_t> data_;
};

/// Canonical key for a configuration a_W: the margin W sorted ascending and
/// a mixed-radix code with the smallest vertex as least-significant digit.
struct ConfigKey {
  std::vector<int> margin;
  std::uint64_t code = 0;

  bool operator==(const ConfigKey&) const = default;
};

/// Sorted copy of W, validated against dims. Throws on duplicates or
/// out-of-range vertices.
inline std::vector<int> sorted_margin(std::vector<int> w, const ProblemDims& dims) {
  std::sort(w.begin(), w.end());
  for (size_t i = 0; i < w.size(); ++i) {
    if (w[i] < 0 || w[i] >= dims.d) throw InvalidMargin("vertex out of range");
    if (i > 0 && w[i] == w[i - 1]) throw InvalidMargin("duplicate vertex in margin");
  }
  return w;
}

inline ConfigKey encode_config(const std::vector<int>& symbols, const std::vector<int>& w,
                               const ProblemDims& dims) {
  if (symbols.size() != w.size()) throw InvalidMargin("encode_config: |a_W| != |W|");
  // Pair symbols with their vertices, then sort by vertex.
  std::vector<std::pair<int, int>> vs(w.size());
  for (size_t i = 0; i < w.size(); ++i) {
    if (w[i] < 0 || w[i] >= dims.d) throw InvalidMargin("encode_config: vertex out of range");
    if (symbols[i] < 0 || symbols[i] >= dims.alphabet_size)
      throw InvalidSymbol("encode_config: symbol out of range");
    vs[i] = {w[i], symbols[i]};
  }
  std::sort(vs.begin(), vs.end());
  for (size_t i = 1; i < vs.size(); ++i)
    if (vs[i].first == vs[i - 1].first) throw InvalidMargin("encode_config: duplicate vertex");

  ConfigKey key;
  key.margin.reserve(vs.size());
  std::uint64_t radix = 1;
  for (const auto& [v, s] : vs) {
    key.margin.push_back(v);
    key.code += radix * static_cast<std::uint64_t>(s);
    radix *= static_cast<std::uint64_t>(dims.alphabet_size);
  }
  return key;
}

/// Inverse of encode_config: symbols aligned with the sorted margin.
inline std::vector<int> decode_config(const ConfigKey& key, const ProblemDims& dims) {
  std::vector<int> symbols(key.margin.size());
  std::uint64_t code = key.code;
  for (size_t i = 0; i < symbols.size(); ++i) {
    symbols[i] = static_cast<int>(code % dims.alphabet_size);
    code /= dims.alphabet_size;
  }
  return symbols;
}

/// |A|^k as a checked 64-bit integer.
inline std::uint64_t checked_pow(std::uint64_t base, int exp) {
  std::uint64_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > UINT64_MAX / base) throw PenaltyOverflow("integer power overflow");
    r *= base;
  }
  return r;
}

/// Probability vector over a finite support.
struct DiscreteDistribution {
  std::vector<double> probs;

  DiscreteDistribution() = default;
  explicit DiscreteDistribution(std::vector<double> p) : probs(std::move(p)) {
    double sum = 0;
    for (double x : probs) {
      if (x < 0) throw Error("DiscreteDistribution: negative entry");
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw Error("DiscreteDistribution: entries sum to " + std::to_string(sum));
  }

  std::size_t support_size() const { return probs.size(); }
  double operator[](std::size_t i) const { return probs[i]; }
};

/// Number of graphs on d vertices: 2^(d(d-1)/2). Throws above the cap.
inline std::uint64_t graph_space_size(const ProblemDims& dims, int cap_bits = 30) {
  if (dims.edge_slots() > cap_bits)
    throw EnumerationTooLarge("graph space needs " + std::to_string(dims.edge_slots()) +
                              " edge bits, cap is " + std::to_string(cap_bits));
  return 1ull << dims.edge_slots();
}

/// Calls f(Graph) for every simple graph on dims, in increasing edge-bitmask
/// order. First graph is empty, last is complete.
template <typename F>
void for_each_graph(const ProblemDims& dims, F&& f, int cap_bits = 30) {
  const std::uint64_t total = graph_space_size(dims, cap_bits);
  for (std::uint64_t mask = 0; mask < total; ++mask)
    f(Graph::from_edge_mask(dims, mask));
}

inline std::vector<Graph> enumerate_graphs(const ProblemDims& dims, int cap_bits = 30) {
  std::vector<Graph> out;
  out.reserve(graph_space_size(dims, cap_bits));
  for_each_graph(dims, [&](Graph g) { out.push_back(std::move(g)); }, cap_bits);
  return out;
}

}  // namespace mrfselect
