#pragma once

#include <atomic>
#include <thread>

#include "mrfselect/search.hpp"
#include "mrfselect/simulate.hpp"

namespace mrfselect {

enum class SearchMode { exhaustive, greedy, anneal };

inline SearchMode search_mode_from_string(const std::string& s) {
  if (s == "exhaustive") return SearchMode::exhaustive;
  if (s == "greedy") return SearchMode::greedy;
  if (s == "anneal") return SearchMode::anneal;
  throw Error("unknown search mode: " + s);
}

inline std::string to_string(SearchMode m) {
  switch (m) {
    case SearchMode::exhaustive: return "exhaustive";
    case SearchMode::greedy: return "greedy";
    case SearchMode::anneal: return "anneal";
  }
  return "?";
}

/// Runs the selected optimizer. Greedy starts from the empty graph; anneal
/// starts from the greedy result with the scale-aware default schedule.
inline SearchResult run_search(const Sample& sample, const PenaltyConfig& pen, SearchMode mode,
                               std::uint64_t seed) {
  switch (mode) {
    case SearchMode::exhaustive:
      return exhaustive_argmax(sample, pen);
    case SearchMode::greedy:
      return greedy_flip_search(sample, pen, Graph::empty(sample.dims()));
    case SearchMode::anneal: {
      const SearchResult greedy = greedy_flip_search(sample, pen, Graph::empty(sample.dims()));
      const AnnealConfig cfg = default_anneal_config(sample, pen, seed);
      SearchResult sa = simulated_annealing(sample, pen, cfg, greedy.best_graph);
      sa.evaluations += greedy.evaluations;
      return sa;
    }
  }
  throw Error("unreachable");
}

/// One (n, kind) cell of a consistency sweep: how often the estimator
/// recovered G* exactly, overfit (G* strictly contained in the estimate), or
/// underfit (some true edge missing). The three categories partition runs.
struct SweepCell {
  std::uint64_t n = 0;
  ChainKind kind = ChainKind::iid;
  int runs = 0;
  int exact = 0;
  int overfit = 0;
  int underfit = 0;

  double recovery_fraction() const { return runs ? double(exact) / runs : 0; }
  double overfit_fraction() const { return runs ? double(overfit) / runs : 0; }
  double underfit_fraction() const { return runs ? double(underfit) / runs : 0; }
};

struct SweepReport {
  Graph true_graph;
  double c = 1.0;
  SearchMode mode = SearchMode::exhaustive;
  std::vector<SweepCell> cells;  // ordered by (kind, n)
};

/// Generate-estimate-compare over an n grid, a seed list, and process kinds.
/// Replications run on a worker pool; cells are assembled in a fixed order so
/// reports are byte-stable regardless of thread count.
inline SweepReport run_consistency_sweep(const TrueModel& model, const Graph& gstar, double c,
                                         SearchMode mode,
                                         const std::vector<std::uint64_t>& n_grid,
                                         const std::vector<std::uint64_t>& seeds,
                                         const std::vector<ChainKind>& kinds, double rho) {
  SweepReport report;
  report.true_graph = gstar;
  report.c = c;
  report.mode = mode;

  struct Task {
    std::size_t cell = 0;
    std::uint64_t n = 0;
    ChainKind kind = ChainKind::iid;
    std::uint64_t seed = 0;
  };
  std::vector<Task> tasks;
  for (ChainKind kind : kinds) {
    for (std::uint64_t n : n_grid) {
      SweepCell cell;
      cell.n = n;
      cell.kind = kind;
      const std::size_t index = report.cells.size();
      report.cells.push_back(cell);
      for (std::uint64_t seed : seeds) tasks.push_back({index, n, kind, seed});
    }
  }

  enum class Outcome : std::uint8_t { exact, overfit, underfit };
  std::vector<Outcome> outcomes(tasks.size());
  std::atomic<std::size_t> cursor{0};
  const int workers = std::max(1, std::min<int>(worker_count(), static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = cursor.fetch_add(1); i < tasks.size(); i = cursor.fetch_add(1)) {
        const Task& task = tasks[i];
        const MixingChainConfig cfg(task.kind, task.kind == ChainKind::lazy_refresh ? rho : 0.0,
                                    task.seed);
        const Sample sample = generate_chain(model, cfg, task.n);
        const SearchResult result =
            run_search(sample, PenaltyConfig(c, sample.n()), mode, task.seed);
        if (result.best_graph == gstar)
          outcomes[i] = Outcome::exact;
        else if (result.best_graph.contains(gstar))
          outcomes[i] = Outcome::overfit;
        else
          outcomes[i] = Outcome::underfit;
      }
    });
  }
  for (auto& th : pool) th.join();

  for (std::size_t i = 0; i < tasks.size(); ++i) {
    SweepCell& cell = report.cells[tasks[i].cell];
    ++cell.runs;
    switch (outcomes[i]) {
      case Outcome::exact: ++cell.exact; break;
      case Outcome::overfit: ++cell.overfit; break;
      case Outcome::underfit: ++cell.underfit; break;
    }
  }
  return report;
}

}  // namespace mrfselect
