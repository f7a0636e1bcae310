#pragma once

#include <cstdlib>
#include <optional>
#include <random>
#include <thread>

#include "mrfselect/score.hpp"

namespace mrfselect {

struct SearchResult {
  Graph best_graph;
  double best_score = 0;
  std::uint64_t evaluations = 0;
  std::vector<std::pair<std::uint64_t, double>> trace;  // (step, score), optional
};

struct AnnealConfig {
  double initial_temperature = 1.0;
  double cooling_factor = 0.95;
  int steps_per_temperature = 20;
  double min_temperature = 1e-4;
  std::uint64_t seed = 0;
};

/// Worker count: MRF_SELECT_THREADS if set, else hardware concurrency.
inline int worker_count() {
  if (const char* env = std::getenv("MRF_SELECT_THREADS")) {
    const int k = std::atoi(env);
    if (k >= 1) return k;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

namespace detail {

/// Candidate ordering for the exhaustive argmax: higher score wins; exact
/// score ties go to fewer edges, then smaller edge bitmask. Thread-count
/// independent because the merge uses the same total order as the scan.
struct Candidate {
  double score = -std::numeric_limits<double>::infinity();
  int edge_count = 0;
  std::uint64_t mask = 0;

  bool beats(const Candidate& other) const {
    if (score != other.score) return score > other.score;
    if (edge_count != other.edge_count) return edge_count < other.edge_count;
    return mask < other.mask;
  }
};

}  // namespace detail

/// Exact argmax of the penalized score over all 2^(d(d-1)/2) graphs.
inline SearchResult exhaustive_argmax(const Sample& sample, const PenaltyConfig& pen,
                                      int cap_bits = 28) {
  const ProblemDims dims = sample.dims();
  const std::uint64_t total = graph_space_size(dims, cap_bits);
  VertexScoreCache cache(dims.d);

  const int workers = std::min<std::uint64_t>(worker_count(), total);
  std::vector<detail::Candidate> winners(workers);
  std::vector<std::thread> threads;
  const std::uint64_t chunk = (total + workers - 1) / workers;
  for (int t = 0; t < workers; ++t) {
    threads.emplace_back([&, t] {
      const std::uint64_t lo = t * chunk;
      const std::uint64_t hi = std::min(total, lo + chunk);
      detail::Candidate best;
      for (std::uint64_t mask = lo; mask < hi; ++mask) {
        const Graph g = Graph::from_edge_mask(dims, mask);
        detail::Candidate cand{graph_score(sample, g, pen, &cache), g.edge_count(), mask};
        if (cand.beats(best)) best = cand;
      }
      winners[t] = best;
    });
  }
  for (auto& th : threads) th.join();

  detail::Candidate best;
  for (const auto& w : winners)
    if (w.beats(best)) best = w;

  SearchResult result;
  result.best_graph = Graph::from_edge_mask(dims, best.mask);
  result.best_score = best.score;
  result.evaluations = total;
  return result;
}

/// Steepest-ascent single-edge-flip local search. Ties between flips go to
/// the smallest edge slot index; stops when no flip improves by > 1e-12.
inline SearchResult greedy_flip_search(const Sample& sample, const PenaltyConfig& pen,
                                       const Graph& start) {
  constexpr double kImprovementFloor = 1e-12;
  const ProblemDims dims = sample.dims();
  if (dims != start.dims()) throw Error("greedy_flip_search: dims mismatch");
  VertexScoreCache cache(dims.d);

  SearchResult result;
  result.best_graph = start;
  result.best_score = graph_score(sample, start, pen, &cache);
  result.evaluations = 1;
  result.trace.emplace_back(0, result.best_score);

  for (std::uint64_t step = 1;; ++step) {
    double best_delta = kImprovementFloor;
    int best_u = -1, best_v = -1;
    for (int u = 0; u < dims.d; ++u) {
      for (int v = u + 1; v < dims.d; ++v) {
        const double delta =
            score_delta_for_edge_flip(sample, result.best_graph, u, v, pen, &cache);
        ++result.evaluations;
        // Strict > keeps the smallest edge slot among tied flips.
        if (delta > best_delta) {
          best_delta = delta;
          best_u = u;
          best_v = v;
        }
      }
    }
    if (best_u < 0) break;
    result.best_graph = result.best_graph.with_edge_flipped(best_u, best_v);
    result.best_score += best_delta;
    result.trace.emplace_back(step, result.best_score);
  }
  // Re-anchor the score; accumulated deltas can drift at the 1e-12 scale.
  result.best_score = graph_score(sample, result.best_graph, pen, &cache);
  return result;
}

/// Scale-aware default schedule for the given instance.
inline AnnealConfig default_anneal_config(const Sample& sample, const PenaltyConfig& pen,
                                          std::uint64_t seed) {
  VertexScoreCache cache(sample.dims().d);
  const double lo = graph_score(sample, Graph::empty(sample.dims()), pen, &cache);
  const double hi = graph_score(sample, Graph::complete(sample.dims()), pen, &cache);
  AnnealConfig cfg;
  cfg.initial_temperature = std::max(1.0, std::abs(lo - hi)) / 10.0;
  cfg.cooling_factor = 0.95;
  cfg.steps_per_temperature = 20 * sample.dims().edge_slots();
  cfg.min_temperature = 1e-4;
  cfg.seed = seed;
  return cfg;
}

/// Metropolis on the score with uniform random single-edge-flip proposals.
/// Returns the best graph ever visited, not the final state.
inline SearchResult simulated_annealing(const Sample& sample, const PenaltyConfig& pen,
                                        const AnnealConfig& cfg,
                                        std::optional<Graph> start = std::nullopt) {
  const ProblemDims dims = sample.dims();
  VertexScoreCache cache(dims.d);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<int> pick_slot(0, std::max(0, dims.edge_slots() - 1));
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Graph current = start.value_or(Graph::empty(dims));
  double current_score = graph_score(sample, current, pen, &cache);

  SearchResult result;
  result.best_graph = current;
  result.best_score = current_score;
  result.evaluations = 1;

  // Slot -> (u,v) lookup, lexicographic order.
  std::vector<std::pair<int, int>> slot_edges;
  for (int u = 0; u < dims.d; ++u)
    for (int v = u + 1; v < dims.d; ++v) slot_edges.emplace_back(u, v);

  std::uint64_t step = 0;
  for (double temp = cfg.initial_temperature; temp >= cfg.min_temperature;
       temp *= cfg.cooling_factor) {
    for (int s = 0; s < cfg.steps_per_temperature; ++s, ++step) {
      if (slot_edges.empty()) break;
      const auto [u, v] = slot_edges[pick_slot(rng)];
      const double delta = score_delta_for_edge_flip(sample, current, u, v, pen, &cache);
      ++result.evaluations;
      if (delta >= 0 || unif(rng) < std::exp(delta / temp)) {
        current = current.with_edge_flipped(u, v);
        current_score += delta;
        if (current_score > result.best_score) {
          result.best_graph = current;
          result.best_score = current_score;
          result.trace.emplace_back(step, current_score);
        }
      }
    }
  }
  result.best_score = graph_score(sample, result.best_graph, pen, &cache);
  return result;
}

}  // namespace mrfselect
