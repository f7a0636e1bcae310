#pragma once

#include <cmath>
#include <span>

#include "mrfselect/counts.hpp"
#include "mrfselect/types.hpp"

namespace mrfselect {

/// Penalty weight lambda_n = c * ln(n).
struct PenaltyConfig {
  double c = 1.0;
  std::uint64_t n = 0;

  PenaltyConfig() = default;
  PenaltyConfig(double c_, std::uint64_t n_) : c(c_), n(n_) {
    if (c < 0) throw Error("PenaltyConfig: c must be >= 0");
    if (n < 1) throw Error("PenaltyConfig: n must be >= 1");
  }

  double lambda() const { return c * std::log(static_cast<double>(n)); }
};

namespace detail {

/// Pairwise (tree) summation; reproducible across chunkings at desk scale.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

}  // namespace detail

/// One vertex's contribution to the objective: the log-likelihood term and
/// the penalty size |A|^|nb| in exact integer units.
struct VertexScore {
  int v = 0;
  std::vector<int> nb;
  double loglik = 0;
  std::uint64_t penalty_units = 1;
};

/// Sum over configurations with N(a_v, a_nb) > 0 of
/// N(a_v, a_nb) * ln( N(a_v, a_nb) / N(a_nb) ). Always finite, always <= 0.
inline double vertex_loglik(const Sample& sample, int v, const std::vector<int>& nb) {
  const NodeCounts nc = node_statistics(sample, v, nb);
  const std::uint64_t radix = sample.dims().alphabet_size;

  // Deterministic order: terms sorted by joint key, then tree-summed.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> entries(nc.joint.begin(), nc.joint.end());
  std::sort(entries.begin(), entries.end());

  std::vector<double> terms;
  terms.reserve(entries.size());
  for (const auto& [key, njoint] : entries) {
    const std::uint64_t nmargin = nc.margin.at(key / radix);
    terms.push_back(static_cast<double>(njoint) *
                    std::log(static_cast<double>(njoint) / static_cast<double>(nmargin)));
  }
  return detail::pairwise_sum(terms);
}

inline VertexScore score_vertex(const Sample& sample, int v, const std::vector<int>& nb) {
  VertexScore vs;
  vs.v = v;
  vs.nb = sorted_margin(nb, sample.dims());
  vs.loglik = vertex_loglik(sample, v, vs.nb);
  vs.penalty_units = checked_pow(sample.dims().alphabet_size, static_cast<int>(vs.nb.size()));
  return vs;
}

/// Memo of vertex log-likelihoods keyed by (v, neighborhood bitmask).
class VertexScoreCache {
 public:
  explicit VertexScoreCache(int d) : per_vertex_(static_cast<size_t>(d)) {}

  double get_or_compute(const Sample& sample, int v, std::uint64_t nb_mask) {
    auto& slot = per_vertex_[v];
    {
      std::shared_lock lock(slot.mutex);
      auto it = slot.map.find(nb_mask);
      if (it != slot.map.end()) return it->second;
    }
    std::vector<int> nb;
    std::uint64_t m = nb_mask;
    while (m) {
      nb.push_back(std::countr_zero(m));
      m &= m - 1;
    }
    const double value = vertex_loglik(sample, v, nb);
    std::unique_lock lock(slot.mutex);
    slot.map.emplace(nb_mask, value);
    return value;
  }

 private:
  struct Slot {
    std::shared_mutex mutex;
    std::unordered_map<std::uint64_t, double> map;
  };
  std::vector<Slot> per_vertex_;
};

/// Total penalty Sum_v |A|^|G(v)| in exact integer units.
inline std::uint64_t penalty_units(const Graph& g) {
  std::uint64_t total = 0;
  for (int v = 0; v < g.dims().d; ++v) {
    const std::uint64_t units = checked_pow(g.dims().alphabet_size, g.degree(v));
    if (total > UINT64_MAX - units) throw PenaltyOverflow("penalty sum overflow");
    total += units;
  }
  return total;
}

/// Penalized log pseudo-likelihood of a graph:
/// Sum_v vertex_loglik(v, G(v)) - lambda_n * Sum_v |A|^|G(v)|.
inline double graph_score(const Sample& sample, const Graph& g, const PenaltyConfig& pen,
                          VertexScoreCache* cache = nullptr) {
  if (g.dims() != sample.dims()) throw Error("graph_score: dims mismatch");
  std::vector<double> logliks(static_cast<size_t>(g.dims().d));
  for (int v = 0; v < g.dims().d; ++v)
    logliks[v] = cache ? cache->get_or_compute(sample, v, g.neighbor_mask(v))
                       : vertex_loglik(sample, v, g.neighbors(v));
  return detail::pairwise_sum(logliks) -
         pen.lambda() * static_cast<double>(penalty_units(g));
}

/// Score change from flipping edge (u,v); only the two affected vertex terms
/// are re-evaluated.
inline double score_delta_for_edge_flip(const Sample& sample, const Graph& g, int u, int v,
                                        const PenaltyConfig& pen,
                                        VertexScoreCache* cache = nullptr) {
  if (u == v) throw Error("score_delta_for_edge_flip: self loop");
  const Graph flipped = g.with_edge_flipped(u, v);
  const int alpha = sample.dims().alphabet_size;
  double delta = 0;
  for (int w : {u, v}) {
    const double before = cache ? cache->get_or_compute(sample, w, g.neighbor_mask(w))
                                : vertex_loglik(sample, w, g.neighbors(w));
    const double after = cache ? cache->get_or_compute(sample, w, flipped.neighbor_mask(w))
                               : vertex_loglik(sample, w, flipped.neighbors(w));
    const double pen_before = static_cast<double>(checked_pow(alpha, g.degree(w)));
    const double pen_after = static_cast<double>(checked_pow(alpha, flipped.degree(w)));
    delta += (after - before) - pen.lambda() * (pen_after - pen_before);
  }
  return delta;
}

}  // namespace mrfselect
