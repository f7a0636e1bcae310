#pragma once

#include <limits>
#include <map>
#include <optional>
#include <random>

#include "mrfselect/types.hpp"

namespace mrfselect {

/// Pairwise Gibbs parameterization for building strictly positive test
/// models: pi(a) proportional to exp( Sum_v h_v(a_v) + Sum_(u,v) J_uv(a_u,a_v) ).
struct PairwisePotentialSpec {
  ProblemDims dims;
  // h[v][a], always present for every vertex (zeros by default).
  std::vector<std::vector<double>> vertex_potentials;
  // J keyed by (u,v) with u < v; row-major |A| x |A|, J[a_u][a_v].
  std::map<std::pair<int, int>, std::vector<double>> edge_potentials;

  explicit PairwisePotentialSpec(ProblemDims dims_)
      : dims(dims_),
        vertex_potentials(dims_.d, std::vector<double>(dims_.alphabet_size, 0.0)) {}

  void set_edge(int u, int v, std::vector<double> J) {
    if (u > v) {
      // Store on (min,max); transpose so J[a_u][a_v] indexing stays valid.
      const int a = dims.alphabet_size;
      std::vector<double> Jt(J.size());
      for (int i = 0; i < a; ++i)
        for (int j = 0; j < a; ++j) Jt[j * a + i] = J[i * a + j];
      std::swap(u, v);
      J = std::move(Jt);
    }
    if (u == v || u < 0 || v >= dims.d) throw Error("set_edge: bad edge");
    if (J.size() != static_cast<size_t>(dims.alphabet_size) * dims.alphabet_size)
      throw Error("set_edge: wrong matrix size");
    edge_potentials[{u, v}] = std::move(J);
  }
};

/// Exact joint distribution over A^d, indexed by the full-margin config code
/// (vertex 0 is the least-significant digit).
class TrueModel {
 public:
  TrueModel(ProblemDims dims, std::vector<double> joint)
      : dims_(dims), joint_(std::move(joint)) {
    if (joint_.size() != checked_pow(dims_.alphabet_size, dims_.d))
      throw Error("TrueModel: joint size mismatch");
    double sum = 0;
    for (double p : joint_) {
      if (p < 0) throw Error("TrueModel: negative mass");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw Error("TrueModel: joint does not sum to 1");
  }

  const ProblemDims& dims() const { return dims_; }
  const std::vector<double>& joint() const { return joint_; }

  int symbol_of(std::uint64_t config, int v) const {
    return static_cast<int>(config / vertex_radix(v) % dims_.alphabet_size);
  }

  /// Restriction of a full config code to the sorted margin w.
  std::uint64_t restrict_config(std::uint64_t config, const std::vector<int>& w) const {
    std::uint64_t code = 0, radix = 1;
    for (int v : w) {
      code += radix * symbol_of(config, v);
      radix *= dims_.alphabet_size;
    }
    return code;
  }

  /// Exact marginal over the sorted margin w, indexed by margin code.
  std::vector<double> marginal(const std::vector<int>& w_in) const {
    const auto w = sorted_margin(w_in, dims_);
    std::vector<double> out(checked_pow(dims_.alphabet_size, static_cast<int>(w.size())), 0.0);
    for (std::uint64_t c = 0; c < joint_.size(); ++c) out[restrict_config(c, w)] += joint_[c];
    return out;
  }

  /// pi_min: smallest positive conditional pi(a_v | a_{V\{v}}) over all v and
  /// all positive-probability complement configurations.
  double pi_min() const {
    double best = 1.0;
    for (int v = 0; v < dims_.d; ++v) {
      std::vector<int> rest;
      for (int u = 0; u < dims_.d; ++u)
        if (u != v) rest.push_back(u);
      const auto rest_marg = marginal(rest);
      for (std::uint64_t c = 0; c < joint_.size(); ++c) {
        const double denom = rest_marg[restrict_config(c, rest)];
        if (denom > 0 && joint_[c] > 0) best = std::min(best, joint_[c] / denom);
      }
    }
    return best;
  }

 private:
  std::uint64_t vertex_radix(int v) const { return checked_pow(dims_.alphabet_size, v); }

  ProblemDims dims_;
  std::vector<double> joint_;
};

inline TrueModel joint_from_potentials(const PairwisePotentialSpec& spec) {
  const std::uint64_t size_cap = 10'000'000;
  const std::uint64_t total = checked_pow(spec.dims.alphabet_size, spec.dims.d);
  if (total > size_cap) throw ModelTooLarge("joint table exceeds size cap");

  const int a = spec.dims.alphabet_size;
  std::vector<double> joint(total);
  std::vector<int> sym(spec.dims.d);
  for (std::uint64_t c = 0; c < total; ++c) {
    std::uint64_t code = c;
    for (int v = 0; v < spec.dims.d; ++v) {
      sym[v] = static_cast<int>(code % a);
      code /= a;
    }
    double energy = 0;
    for (int v = 0; v < spec.dims.d; ++v) energy += spec.vertex_potentials[v][sym[v]];
    for (const auto& [edge, J] : spec.edge_potentials)
      energy += J[sym[edge.first] * a + sym[edge.second]];
    joint[c] = std::exp(energy);
  }
  const double z = std::accumulate(joint.begin(), joint.end(), 0.0);
  for (double& p : joint) p /= z;
  return TrueModel(spec.dims, std::move(joint));
}

/// Exact conditional pi(a_W | a_W') as a distribution over A^|W| indexed by
/// the target margin code. W' empty yields the marginal of W.
inline DiscreteDistribution true_conditional(const TrueModel& model,
                                             const std::vector<int>& target_in,
                                             const std::vector<int>& given_in,
                                             std::uint64_t given_code) {
  const auto target = sorted_margin(target_in, model.dims());
  const auto given = given_in.empty() ? std::vector<int>{} : sorted_margin(given_in, model.dims());
  for (int v : target)
    if (std::binary_search(given.begin(), given.end(), v))
      throw InvalidMargin("true_conditional: overlapping margins");

  std::vector<double> probs(
      checked_pow(model.dims().alphabet_size, static_cast<int>(target.size())), 0.0);
  double denom = 0;
  for (std::uint64_t c = 0; c < model.joint().size(); ++c) {
    if (!given.empty() && model.restrict_config(c, given) != given_code) continue;
    probs[model.restrict_config(c, target)] += model.joint()[c];
    denom += model.joint()[c];
  }
  if (denom <= 0) throw ZeroProbabilityCondition("true_conditional: pi(a_W') = 0");
  for (double& p : probs) p /= denom;
  return DiscreteDistribution(std::move(probs));
}

namespace detail {

/// Conditional table pi(a_v | a_W) for every a_W with positive mass, keyed by
/// the code of a_W over the sorted margin w. Row length |A|; rows for
/// zero-mass conditioning configs are empty.
inline std::vector<std::vector<double>> conditional_table(const TrueModel& model, int v,
                                                          const std::vector<int>& w) {
  const int a = model.dims().alphabet_size;
  const std::uint64_t rows = checked_pow(a, static_cast<int>(w.size()));
  std::vector<std::vector<double>> table(rows);
  std::vector<double> mass(rows, 0.0);
  std::vector<std::vector<double>> nums(rows, std::vector<double>(a, 0.0));
  for (std::uint64_t c = 0; c < model.joint().size(); ++c) {
    const std::uint64_t wc = model.restrict_config(c, w);
    nums[wc][model.symbol_of(c, v)] += model.joint()[c];
    mass[wc] += model.joint()[c];
  }
  for (std::uint64_t r = 0; r < rows; ++r) {
    if (mass[r] <= 0) continue;
    table[r] = nums[r];
    for (double& p : table[r]) p /= mass[r];
  }
  return table;
}

/// True when W (bitmask over V\{v}) is a Markov neighborhood of v: on every
/// positive-probability full configuration, pi(a_v | a_{V\{v}}) equals
/// pi(a_v | a_W) within tol.
inline bool is_markov_neighborhood(const TrueModel& model, int v, std::uint64_t w_mask,
                                   double tol) {
  const int d = model.dims().d;
  std::vector<int> w, rest;
  for (int u = 0; u < d; ++u) {
    if (u == v) continue;
    rest.push_back(u);
    if (w_mask >> u & 1) w.push_back(u);
  }
  const auto full_table = conditional_table(model, v, rest);
  const auto w_table = conditional_table(model, v, w);
  for (std::uint64_t c = 0; c < model.joint().size(); ++c) {
    if (model.joint()[c] <= 0) continue;
    const auto& full_row = full_table[model.restrict_config(c, rest)];
    const auto& w_row = w_table[model.restrict_config(c, w)];
    const int a_v = model.symbol_of(c, v);
    if (std::abs(full_row[a_v] - w_row[a_v]) > tol) return false;
  }
  return true;
}

}  // namespace detail

/// Basic neighborhoods ne(v) = intersection of all Markov neighborhoods of v,
/// plus the graph they induce. Throws MarkovIntersectionViolation when the
/// intersection itself fails the Markov test (non-positive joints can do this).
inline std::pair<std::vector<std::vector<int>>, Graph> basic_neighborhoods(const TrueModel& model,
                                                                           double tol = 1e-9) {
  const int d = model.dims().d;
  std::vector<std::vector<int>> nes(d);
  Graph gstar = Graph::empty(model.dims());

  for (int v = 0; v < d; ++v) {
    const std::uint64_t rest_mask = ((d == 64 ? ~0ull : (1ull << d) - 1)) & ~(1ull << v);
    std::uint64_t intersection = rest_mask;
    // Enumerate subsets of V\{v}.
    std::uint64_t sub = rest_mask;
    while (true) {
      if (detail::is_markov_neighborhood(model, v, sub, tol)) intersection &= sub;
      if (sub == 0) break;
      sub = (sub - 1) & rest_mask;
    }
    if (!detail::is_markov_neighborhood(model, v, intersection, tol))
      throw MarkovIntersectionViolation(
          "intersection of Markov neighborhoods of vertex " + std::to_string(v + 1) +
          " is not itself a Markov neighborhood");
    std::uint64_t m = intersection;
    while (m) {
      nes[v].push_back(std::countr_zero(m));
      m &= m - 1;
    }
  }

  // Assemble the graph; basic neighborhoods of a well-formed model are
  // symmetric, assert rather than silently symmetrize.
  for (int v = 0; v < d; ++v)
    for (int w : nes[v]) {
      const auto& nw = nes[w];
      if (!std::binary_search(nw.begin(), nw.end(), v))
        throw MarkovIntersectionViolation("asymmetric basic neighborhoods at vertices " +
                                          std::to_string(v + 1) + ", " + std::to_string(w + 1));
      gstar = gstar.with_edge(v, w);
    }
  return {nes, gstar};
}

/// KL divergence D(p;q) with the conventions 0*ln(0/q)=0 and
/// p>0=q -> +infinity.
inline double kl_divergence(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  if (p.support_size() != q.support_size()) throw SupportMismatch("kl_divergence: support sizes");
  double d = 0;
  for (std::size_t i = 0; i < p.support_size(); ++i) {
    if (p[i] == 0) continue;
    if (q[i] == 0) return std::numeric_limits<double>::infinity();
    d += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(d, 0.0);
}

/// Chi-square upper bound on the KL divergence:
/// Sum over {a : q(a)>0} of (p(a)-q(a))^2 / q(a).
inline double kl_chi2_bound(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  if (p.support_size() != q.support_size()) throw SupportMismatch("kl_chi2_bound: support sizes");
  double b = 0;
  for (std::size_t i = 0; i < p.support_size(); ++i) {
    if (q[i] <= 0) continue;
    const double diff = p[i] - q[i];
    b += diff * diff / q[i];
  }
  return b;
}

/// Separation constant alpha(v): the minimum, over graphs G whose
/// neighborhood of v misses part of ne(v), of the expected KL gap between
/// the true conditional given G*(v) and the one given G(v). Graphs that
/// violate G* only away from v are excluded: their KL terms at v vanish, so
/// including them would force alpha(v) to 0 and break its strict positivity.
/// Empty candidate set (ne(v) empty) -> nullopt, read as unbounded.
inline std::optional<double> alpha(const TrueModel& model, int v, const Graph& gstar,
                                   int cap_bits = 30) {
  const ProblemDims dims = model.dims();
  std::vector<int> rest;
  for (int u = 0; u < dims.d; ++u)
    if (u != v) rest.push_back(u);
  const auto rest_marg = model.marginal(rest);
  const std::vector<int> star_nb = gstar.neighbors(v);
  const std::uint64_t star_mask = gstar.neighbor_mask(v);
  const auto star_table = detail::conditional_table(model, v, star_nb);

  std::optional<double> best;
  for_each_graph(dims, [&](const Graph& g) {
    if ((g.neighbor_mask(v) & star_mask) == star_mask) return;
    const std::vector<int> g_nb = g.neighbors(v);
    const auto g_table = detail::conditional_table(model, v, g_nb);
    // Expected KL over the complement margin.
    double total = 0;
    for (std::uint64_t rc = 0; rc < rest_marg.size(); ++rc) {
      if (rest_marg[rc] <= 0) continue;
      // Lift the complement code back to a full config (a_v arbitrary, 0) to
      // reuse restrict_config for sub-margins.
      std::uint64_t full = 0;
      {
        std::uint64_t code = rc;
        for (int u : rest) {
          full += (code % dims.alphabet_size) * checked_pow(dims.alphabet_size, u);
          code /= dims.alphabet_size;
        }
      }
      const auto& p_row = star_table[model.restrict_config(full, star_nb)];
      const auto& q_row = g_table[model.restrict_config(full, g_nb)];
      total += rest_marg[rc] * kl_divergence(DiscreteDistribution(p_row),
                                             DiscreteDistribution(q_row));
    }
    if (!best || total < *best) best = total;
  }, cap_bits);
  return best;
}

/// Inverse-CDF sampler over the joint table; exactly one uniform per draw.
class JointSampler {
 public:
  explicit JointSampler(const TrueModel& model) : cdf_(model.joint().size()) {
    std::partial_sum(model.joint().begin(), model.joint().end(), cdf_.begin());
  }

  std::uint64_t draw(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), unif(rng));
    return std::min<std::uint64_t>(it - cdf_.begin(), cdf_.size() - 1);
  }

 private:
  std::vector<double> cdf_;
};

/// n i.i.d. draws from the joint, reproducible from the seed.
inline Sample exact_sample(const TrueModel& model, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const JointSampler sampler(model);
  std::vector<std::uint8_t> data;
  data.reserve(n * model.dims().d);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t c = sampler.draw(rng);
    for (int v = 0; v < model.dims().d; ++v)
      data.push_back(static_cast<std::uint8_t>(model.symbol_of(c, v)));
  }
  return Sample(model.dims(), std::move(data));
}

}  // namespace mrfselect
