#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "helpers.hpp"
#include "mrfselect/io.hpp"

using namespace mrfselect;

TEST_CASE("ingest_csv") {
  SECTION("minimal two-by-two sample") {
    std::istringstream in("0,1\n1,0\n");
    const Sample s = ingest_csv(in);
    CHECK(s.n() == 2);
    CHECK(s.dims().d == 2);
    CHECK(s.dims().alphabet_size == 2);
    CHECK(s.at(0, 1) == 1);
    CHECK(s.at(1, 0) == 1);
  }

  SECTION("header flag skips the first line") {
    std::istringstream in("v1,v2\n0,1\n1,0\n");
    CHECK(ingest_csv(in, true).n() == 2);
  }

  SECTION("ragged rows are rejected with the line number") {
    std::istringstream in("0,1\n1\n");
    CHECK_THROWS_WITH(ingest_csv(in), Catch::Matchers::ContainsSubstring("line 2"));
  }

  SECTION("non-integer cells are rejected with line and column") {
    std::istringstream in("0,1\n1,x\n");
    try {
      ingest_csv(in);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring("line 2"));
      CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring("col 2"));
    }
  }

  SECTION("symbol above the declared alphabet size") {
    std::istringstream in("0,2\n");
    CHECK_THROWS_AS(ingest_csv(in, false, 2), InvalidSymbol);
  }

  SECTION("alphabet inference takes 1 + max symbol") {
    std::istringstream in("0,2\n1,0\n");
    CHECK(ingest_csv(in).dims().alphabet_size == 3);
  }
}

TEST_CASE("sample CSV round-trips bit-identically") {
  const Sample original = mrfselect::testing::random_sample(ProblemDims(6, 3), 5000, 13);
  std::ostringstream out;
  export_csv(original, out);
  std::istringstream in(out.str());
  const Sample back = ingest_csv(in, false, 3);
  CHECK(back.raw() == original.raw());
}

TEST_CASE("model file format") {
  SECTION("minimal independent uniform model") {
    std::istringstream in("2 2\n1 0 0\n2 0 0\n");
    const PairwisePotentialSpec spec = import_model(in);
    CHECK(spec.dims.d == 2);
    CHECK(spec.dims.alphabet_size == 2);
    CHECK(spec.edge_potentials.empty());
    const TrueModel model = joint_from_potentials(spec);
    for (double p : model.joint()) CHECK(p == Catch::Approx(0.25));
  }

  SECTION("ferromagnetic pair round-trips exactly") {
    std::istringstream in("2 2\n1 0 0\n2 0 0\n1 2 0.5 0 0 0.5\n");
    const PairwisePotentialSpec spec = import_model(in);
    REQUIRE(spec.edge_potentials.contains({0, 1}));
    CHECK(spec.edge_potentials.at({0, 1}) == std::vector<double>{0.5, 0, 0, 0.5});

    std::ostringstream out;
    export_model(spec, out);
    std::istringstream in2(out.str());
    const PairwisePotentialSpec back = import_model(in2);
    CHECK(back.vertex_potentials == spec.vertex_potentials);
    CHECK(back.edge_potentials == spec.edge_potentials);
  }

  SECTION("randomized specs round-trip field-for-field") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> value(-1.5, 1.5);
    for (int trial = 0; trial < 25; ++trial) {
      const int d = 2 + trial % 4;
      const int a = 2 + trial % 2;
      PairwisePotentialSpec spec(ProblemDims(d, a));
      for (int v = 0; v < d; ++v)
        for (int s = 0; s < a; ++s) spec.vertex_potentials[v][s] = value(rng);
      for (int u = 0; u < d; ++u)
        for (int v = u + 1; v < d; ++v) {
          if (trial % 3 == 0 && (u + v) % 2) continue;  // leave some edges out
          std::vector<double> J(a * a);
          for (double& j : J) j = value(rng);
          spec.set_edge(u, v, std::move(J));
        }

      std::ostringstream out;
      export_model(spec, out);
      std::istringstream in(out.str());
      const PairwisePotentialSpec back = import_model(in);
      CHECK(back.dims == spec.dims);
      CHECK(back.vertex_potentials == spec.vertex_potentials);
      CHECK(back.edge_potentials == spec.edge_potentials);
    }
  }

  SECTION("malformed lines carry the line number") {
    std::istringstream in("2 2\n1 0 0\nbogus\n");
    CHECK_THROWS_WITH(import_model(in), Catch::Matchers::ContainsSubstring("line 3"));
  }
}

TEST_CASE("DOT export") {
  const ProblemDims dims(3, 2);
  const Graph g = Graph::empty(dims).with_edge(0, 1);
  std::ostringstream out;
  export_dot(g, out);
  CHECK_THAT(out.str(), Catch::Matchers::ContainsSubstring("1 -- 2;"));
  CHECK_THAT(out.str(), Catch::Matchers::ContainsSubstring("graph estimate {"));
}
