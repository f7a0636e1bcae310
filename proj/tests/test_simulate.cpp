#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "mrfselect/simulate.hpp"

using namespace mrfselect;
using mrfselect::testing::chain3_model;

TEST_CASE("lazy_refresh with rho=0 reproduces exact_sample") {
  const TrueModel m = chain3_model();
  const Sample chain = generate_chain(m, MixingChainConfig(ChainKind::lazy_refresh, 0.0, 42), 500);
  const Sample iid = exact_sample(m, 500, 42);
  CHECK(chain.raw() == iid.raw());
}

TEST_CASE("iid kind ignores rho") {
  const TrueModel m = chain3_model();
  const Sample a = generate_chain(m, MixingChainConfig(ChainKind::iid, 0.0, 7), 300);
  const Sample b = exact_sample(m, 300, 7);
  CHECK(a.raw() == b.raw());
}

TEST_CASE("lazy_refresh lag-1 agreement matches the closed-form rate") {
  const TrueModel m = chain3_model();
  const double rho = 0.99;
  const std::size_t n = 10000;
  const Sample s = generate_chain(m, MixingChainConfig(ChainKind::lazy_refresh, rho, 11), n);

  // P(repeat) = rho + (1-rho) * P(two pi draws agree).
  double repeat_pi = 0;
  for (double p : m.joint()) repeat_pi += p * p;
  const double expected = rho + (1 - rho) * repeat_pi;

  std::size_t agree = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    bool same = true;
    for (int v = 0; v < m.dims().d; ++v)
      if (s.at(i, v) != s.at(i + 1, v)) same = false;
    agree += same;
  }
  CHECK(std::abs(double(agree) / double(n - 1) - expected) < 0.02);
}

TEST_CASE("chains are stationary: pooled frequencies match pi") {
  const TrueModel m = chain3_model();
  const std::size_t n = 100000;
  for (ChainKind kind : {ChainKind::lazy_refresh, ChainKind::gibbs_scan}) {
    const MixingChainConfig cfg(kind, kind == ChainKind::lazy_refresh ? 0.5 : 0.0, 17, 50);
    const Sample s = generate_chain(m, cfg, n);
    std::vector<double> freq(8, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      freq[s.at(i, 0) + 2 * s.at(i, 1) + 4 * s.at(i, 2)] += 1.0 / n;
    for (int c = 0; c < 8; ++c) {
      const double p = m.joint()[c];
      // Wider than the iid CLT band: lag dependence inflates the variance.
      CHECK(std::abs(freq[c] - p) < 10.0 * std::sqrt(p * (1 - p) / double(n)));
    }
  }
}

TEST_CASE("determinism from seed") {
  const TrueModel m = chain3_model();
  const MixingChainConfig cfg(ChainKind::gibbs_scan, 0.0, 23, 10);
  CHECK(generate_chain(m, cfg, 200).raw() == generate_chain(m, cfg, 200).raw());
}

TEST_CASE("mixing_diagnostic") {
  const TrueModel m = chain3_model();

  SECTION("iid samples show only sampling noise") {
    const Sample s = exact_sample(m, 100000, 3);
    const auto coeffs = mixing_diagnostic(s, 5);
    for (const auto& per_vertex : coeffs)
      for (double c : per_vertex) CHECK(c <= 0.1);
  }

  SECTION("lazy_refresh decay: lag 1 above lag 20") {
    const Sample s =
        generate_chain(m, MixingChainConfig(ChainKind::lazy_refresh, 0.9, 31), 100000);
    const auto coeffs = mixing_diagnostic(s, 20);
    for (int v = 0; v < 3; ++v) CHECK(coeffs[0][v] > coeffs[19][v]);
  }

  SECTION("empirical surrogate sits under the geometric envelope") {
    const double rho = 0.8;
    const Sample s =
        generate_chain(m, MixingChainConfig(ChainKind::lazy_refresh, rho, 57), 200000);
    const auto coeffs = mixing_diagnostic(s, 10);
    for (int lag = 1; lag <= 10; ++lag)
      for (int v = 0; v < 3; ++v)
        CHECK(coeffs[lag - 1][v] <= 2.0 * std::pow(rho, lag) + 0.1);
  }

  SECTION("constant sample reports zero by convention") {
    const Sample constant(ProblemDims(2, 2), std::vector<std::uint8_t>(400, 1));
    const auto coeffs = mixing_diagnostic(constant, 3);
    for (const auto& per_vertex : coeffs)
      for (double c : per_vertex) CHECK(c == 0.0);
  }

  SECTION("max_lag bound enforced") {
    const Sample s = exact_sample(m, 100, 1);
    CHECK_THROWS_AS(mixing_diagnostic(s, 10), Error);
  }
}

TEST_CASE("envelope_check") {
  const TrueModel m = chain3_model();
  const std::vector<std::vector<int>> margins{{0}, {1}, {2}, {0, 1}, {1, 2}, {0, 2}};

  SECTION("small n still produces a well-formed report") {
    const EnvelopeReport r = envelope_check(m, MixingChainConfig(ChainKind::iid, 0.0, 0), 1.0,
                                            {4}, {1, 2, 3}, margins);
    REQUIRE(r.points.size() == 1);
    CHECK(r.points[0].n == 4);
    CHECK(r.points[0].marginal_fraction >= 0.0);
    CHECK(r.points[0].marginal_fraction <= 1.0);
  }

  SECTION("moderate n under iid sampling mostly passes") {
    std::vector<std::uint64_t> seeds(20);
    std::iota(seeds.begin(), seeds.end(), 100);
    const EnvelopeReport r = envelope_check(m, MixingChainConfig(ChainKind::iid, 0.0, 0), 1.0,
                                            {1 << 14}, seeds, margins);
    CHECK(r.points[0].marginal_fraction >= 0.9);
    CHECK(r.points[0].conditional_fraction >= 0.9);
  }

  SECTION("delta must be positive") {
    CHECK_THROWS_AS(envelope_check(m, MixingChainConfig(), 0.0, {16}, {1}, margins), Error);
  }
}
