#pragma once

#include <map>
#include <random>

#include "mrfselect/score.hpp"
#include "mrfselect/truth.hpp"

namespace mrfselect::testing {

inline Sample random_sample(ProblemDims dims, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> sym(0, dims.alphabet_size - 1);
  std::vector<std::uint8_t> data(n * dims.d);
  for (auto& s : data) s = static_cast<std::uint8_t>(sym(rng));
  return Sample(dims, std::move(data));
}

inline Graph random_graph(ProblemDims dims, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> mask(0, (1ull << dims.edge_slots()) - 1);
  return Graph::from_edge_mask(dims, mask(rng));
}

/// The standing test model: d=3 chain 1-2-3 over a binary alphabet with
/// attractive couplings on both edges.
inline TrueModel chain3_model(double beta = 0.8) {
  PairwisePotentialSpec spec(ProblemDims(3, 2));
  const std::vector<double> J{beta, 0.0, 0.0, beta};
  spec.set_edge(0, 1, J);
  spec.set_edge(1, 2, J);
  return joint_from_potentials(spec);
}

/// From-scratch evaluation of the penalized objective, no caches, no shared
/// code paths with graph_score beyond the count definitions.
inline double naive_graph_score(const Sample& sample, const Graph& g, const PenaltyConfig& pen) {
  const int a = sample.dims().alphabet_size;
  double loglik = 0;
  double penalty = 0;
  for (int v = 0; v < sample.dims().d; ++v) {
    const auto nb = g.neighbors(v);
    // Tally joint and margin counts with plain nested loops.
    std::map<std::vector<int>, std::uint64_t> joint, margin;
    for (std::size_t i = 0; i < sample.n(); ++i) {
      std::vector<int> key;
      for (int w : nb) key.push_back(sample.at(i, w));
      ++margin[key];
      key.push_back(sample.at(i, v));
      ++joint[key];
    }
    for (const auto& [key, nj] : joint) {
      std::vector<int> mkey(key.begin(), key.end() - 1);
      loglik += double(nj) * std::log(double(nj) / double(margin.at(mkey)));
    }
    penalty += std::pow(double(a), double(nb.size()));
  }
  return loglik - pen.lambda() * penalty;
}

}  // namespace mrfselect::testing
