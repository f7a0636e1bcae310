#pragma once

#include "mrfselect/counts.hpp"
#include "mrfselect/truth.hpp"

namespace mrfselect {

enum class ChainKind { iid, lazy_refresh, gibbs_scan };

inline ChainKind chain_kind_from_string(const std::string& s) {
  if (s == "iid") return ChainKind::iid;
  if (s == "lazy_refresh") return ChainKind::lazy_refresh;
  if (s == "gibbs_scan") return ChainKind::gibbs_scan;
  throw Error("unknown chain kind: " + s);
}

inline std::string to_string(ChainKind k) {
  switch (k) {
    case ChainKind::iid: return "iid";
    case ChainKind::lazy_refresh: return "lazy_refresh";
    case ChainKind::gibbs_scan: return "gibbs_scan";
  }
  return "?";
}

struct MixingChainConfig {
  ChainKind kind = ChainKind::iid;
  double rho = 0.0;  // lazy_refresh hold probability, in [0,1)
  std::uint64_t seed = 0;
  std::size_t burn_in = 0;  // gibbs_scan only, in full sweeps

  MixingChainConfig() = default;
  MixingChainConfig(ChainKind kind_, double rho_, std::uint64_t seed_, std::size_t burn_in_ = 0)
      : kind(kind_), rho(rho_), seed(seed_), burn_in(burn_in_) {
    if (rho < 0 || rho >= 1) throw Error("MixingChainConfig: rho must be in [0,1)");
  }
};

namespace detail {

/// One systematic Glauber sweep over all sites, in place on the config code.
inline std::uint64_t glauber_sweep(const TrueModel& model, std::uint64_t config,
                                   std::mt19937_64& rng) {
  const int a = model.dims().alphabet_size;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uint64_t radix = 1;
  for (int v = 0; v < model.dims().d; ++v, radix *= a) {
    const std::uint64_t base = config - static_cast<std::uint64_t>(model.symbol_of(config, v)) * radix;
    double total = 0;
    for (int s = 0; s < a; ++s) total += model.joint()[base + s * radix];
    if (total <= 0) continue;  // stuck row of a degenerate joint, keep current symbol
    const double u = unif(rng) * total;
    double acc = 0;
    int pick = a - 1;
    for (int s = 0; s < a; ++s) {
      acc += model.joint()[base + s * radix];
      if (u < acc) {
        pick = s;
        break;
      }
    }
    config = base + static_cast<std::uint64_t>(pick) * radix;
  }
  return config;
}

}  // namespace detail

/// Stationary chain with invariant distribution pi:
///  - iid: independent pi draws;
///  - lazy_refresh: keep the previous vector with probability rho, else fresh
///    pi draw (geometric mixing rate by construction);
///  - gibbs_scan: systematic single-site Glauber sweeps after a pi-draw start
///    and burn_in discarded sweeps (diagnostic-grade mixing).
inline Sample generate_chain(const TrueModel& model, const MixingChainConfig& cfg,
                             std::size_t n) {
  std::mt19937_64 rng(cfg.seed);
  const JointSampler sampler(model);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  std::vector<std::uint8_t> data;
  data.reserve(n * model.dims().d);
  const auto push = [&](std::uint64_t config) {
    for (int v = 0; v < model.dims().d; ++v)
      data.push_back(static_cast<std::uint8_t>(model.symbol_of(config, v)));
  };

  if (cfg.kind == ChainKind::gibbs_scan) {
    std::uint64_t config = sampler.draw(rng);
    for (std::size_t b = 0; b < cfg.burn_in; ++b) config = detail::glauber_sweep(model, config, rng);
    for (std::size_t i = 0; i < n; ++i) {
      push(config);
      config = detail::glauber_sweep(model, config, rng);
    }
  } else {
    const double rho = cfg.kind == ChainKind::iid ? 0.0 : cfg.rho;
    std::uint64_t config = sampler.draw(rng);
    push(config);
    for (std::size_t i = 1; i < n; ++i) {
      // Short-circuit keeps the rho=0 stream identical to exact_sample.
      const bool hold = rho > 0.0 && unif(rng) < rho;
      if (!hold) config = sampler.draw(rng);
      push(config);
    }
  }
  return Sample(model.dims(), std::move(data));
}

/// Per-n outcome of the convergence-envelope check.
struct EnvelopePoint {
  std::uint64_t n = 0;
  // Fraction of seeds for which every tested configuration satisfied the
  // bound (marginal: sqrt(delta ln n / n); conditional: denominator N(a_W')).
  double marginal_fraction = 0;
  double conditional_fraction = 0;
};

struct EnvelopeReport {
  double delta = 0;
  std::vector<std::vector<int>> margins;
  std::vector<EnvelopePoint> points;
};

/// Empirical check of the two convergence-envelope bounds over an n grid and
/// a set of seeds. For each margin W the marginal bound covers every a_W with
/// pi(a_W) > 0; multi-vertex margins additionally test the conditional bound
/// with target = smallest vertex of W and the rest conditioned on.
inline EnvelopeReport envelope_check(const TrueModel& model, const MixingChainConfig& base_cfg,
                                     double delta, const std::vector<std::uint64_t>& n_grid,
                                     const std::vector<std::uint64_t>& seeds,
                                     const std::vector<std::vector<int>>& margins) {
  if (delta <= 0) throw Error("envelope_check: delta must be positive");
  EnvelopeReport report;
  report.delta = delta;
  report.margins = margins;

  for (std::uint64_t n : n_grid) {
    EnvelopePoint point;
    point.n = n;
    int marg_pass = 0, cond_pass = 0;
    for (std::uint64_t seed : seeds) {
      MixingChainConfig cfg = base_cfg;
      cfg.seed = seed;
      const Sample sample = generate_chain(model, cfg, n);
      const double marg_bound = std::sqrt(delta * std::log(double(n)) / double(n));

      bool marg_ok = true, cond_ok = true;
      for (const auto& w_in : margins) {
        const auto w = sorted_margin(w_in, model.dims());
        const auto truth = model.marginal(w);
        const auto table = count_margin(sample, w);
        for (std::uint64_t code = 0; code < truth.size(); ++code) {
          if (truth[code] <= 0) continue;
          auto it = table.counts.find(code);
          const double hat = it == table.counts.end() ? 0.0 : double(it->second) / double(n);
          if (std::abs(hat - truth[code]) >= marg_bound) marg_ok = false;
        }
        if (w.size() < 2) continue;

        const std::vector<int> target{w.front()};
        const std::vector<int> given(w.begin() + 1, w.end());
        const auto given_counts = count_margin(sample, given);
        const auto hat_cond = empirical_conditional(sample, target, given);
        for (const auto& [gcode, dist] : hat_cond) {
          const auto true_dist = true_conditional(model, target, given, gcode);
          const double bound =
              std::sqrt(delta * std::log(double(n)) / double(given_counts.counts.at(gcode)));
          for (int s = 0; s < model.dims().alphabet_size; ++s)
            if (std::abs(dist[s] - true_dist[s]) >= bound) cond_ok = false;
        }
      }
      marg_pass += marg_ok;
      cond_pass += cond_ok;
    }
    point.marginal_fraction = seeds.empty() ? 0 : double(marg_pass) / double(seeds.size());
    point.conditional_fraction = seeds.empty() ? 0 : double(cond_pass) / double(seeds.size());
    report.points.push_back(point);
  }
  return report;
}

/// Empirical lag-dependence surrogate: for each lag and vertex, the maximum
/// over symbol pairs (a,b) of |P(X_v^(i+lag)=b | X_v^(i)=a) / P(X_v=b) - 1|,
/// estimated from the sample. Degenerate support reports 0 by convention.
inline std::vector<std::vector<double>> mixing_diagnostic(const Sample& sample, int max_lag) {
  if (max_lag < 1 || static_cast<std::size_t>(max_lag) >= sample.n() / 10)
    throw Error("mixing_diagnostic: max_lag must be in [1, n/10)");
  const int d = sample.dims().d;
  const int a = sample.dims().alphabet_size;
  const std::size_t n = sample.n();

  std::vector<std::vector<double>> coeffs(max_lag, std::vector<double>(d, 0.0));
  for (int v = 0; v < d; ++v) {
    std::vector<double> base(a, 0.0);
    for (std::size_t i = 0; i < n; ++i) base[sample.at(i, v)] += 1.0;
    for (double& x : base) x /= double(n);

    for (int lag = 1; lag <= max_lag; ++lag) {
      std::vector<std::vector<double>> pair(a, std::vector<double>(a, 0.0));
      std::vector<double> from(a, 0.0);
      for (std::size_t i = 0; i + lag < n; ++i) {
        pair[sample.at(i, v)][sample.at(i + lag, v)] += 1.0;
        from[sample.at(i, v)] += 1.0;
      }
      double worst = 0.0;
      for (int s = 0; s < a; ++s) {
        if (from[s] <= 0) continue;
        for (int t = 0; t < a; ++t) {
          if (base[t] <= 0) continue;
          const double cond = pair[s][t] / from[s];
          worst = std::max(worst, std::abs(cond / base[t] - 1.0));
        }
      }
      coeffs[lag - 1][v] = worst;
    }
  }
  return coeffs;
}

}  // namespace mrfselect
