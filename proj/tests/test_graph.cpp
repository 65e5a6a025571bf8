/*
 * Copyright 2026 The GraphTreeGen Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <doctest.h>

#include <cmath>
#include <fstream>

#include "gtg/graph.hpp"
#include "gtg/io.hpp"
#include "gtg/synth.hpp"
#include "support.hpp"

using namespace gtg;

namespace {

Matrix parse(std::string_view s) { return parse_matrix_csv(s); }

std::string slurp(const std::filesystem::path& p) { return read_text(p); }

}  // namespace

TEST_CASE("load_graph: minimal symmetric file") {
  const auto dir = testing::scratch_dir("graph_min");
  write_text("0,0.5\n0.5,0\n", dir / "g.csv");
  const auto g = load_graph(dir / "g.csv");
  CHECK(g.n() == 2);
  CHECK(g(0, 1) == 0.5);
}

TEST_CASE("load_graph: asymmetric file names the offending pair") {
  const auto dir = testing::scratch_dir("graph_asym");
  write_text("0,0.5\n0.4,0\n", dir / "g.csv");
  try {
    load_graph(dir / "g.csv");
    FAIL("expected InvalidGraphError");
  } catch (const InvalidGraphError& e) {
    CHECK(e.violation().kind == Violation::Kind::NonSymmetric);
    CHECK(e.violation().i == 0);
    CHECK(e.violation().j == 1);
    CHECK(e.violation().delta == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(std::string(e.what()) == "NonSymmetric(0,1,0.1)");
  }
}

TEST_CASE("parse errors carry the line number") {
  try {
    parse("0,1\n1\n");
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Parse);
    CHECK(std::string(e.what()).starts_with("ParseError(2)"));
  }
  CHECK_THROWS_AS(parse("0,x\nx,0\n"), Error);
  CHECK_THROWS_AS(parse(""), Error);
}

TEST_CASE("parse accepts CRLF and spaces") {
  const auto m = parse("0, 0.25\r\n0.25 ,0\r\n");
  CHECK(m(0, 1) == 0.25);
  CHECK(m(1, 0) == 0.25);
}

TEST_CASE("validate examples") {
  CHECK(validate(Matrix{{0, 1, 1}, {1, 0, 1}, {1, 1, 0}}).empty());

  auto diag = validate(Matrix{{0, 0, 0}, {0, 0, 0}, {0, 0, 0.3}});
  REQUIRE(diag.size() == 1);
  CHECK(diag[0].kind == Violation::Kind::NonzeroDiagonal);
  CHECK(diag[0].i == 2);

  auto neg = validate(Matrix{{0, -1}, {-1, 0}});
  REQUIRE(neg.size() == 1);
  CHECK(neg[0].kind == Violation::Kind::NegativeWeight);
  CHECK(neg[0].i == 0);
  CHECK(neg[0].j == 1);

  auto ns = validate(Matrix(2, 3));
  REQUIRE(ns.size() == 1);
  CHECK(ns[0].kind == Violation::Kind::NonSquare);

  CHECK(validate(Matrix{{0, NAN}, {NAN, 0}}).front().kind == Violation::Kind::NonFinite);
}

TEST_CASE("validate finds every fuzzed violation and nothing on clean graphs") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto g = testing::random_graph(7, 0.4, seed);
    CHECK(validate(g.adj()).empty());
    SplitMix64 rng(seed + 1000);
    Matrix bad = g.adj();
    const auto i = static_cast<std::size_t>(rng.below(7));
    auto j = static_cast<std::size_t>(rng.below(7));
    if (j == i) j = (i + 1) % 7;
    switch (seed % 3) {
      case 0: bad(i, i) = 0.5; break;
      case 1: bad(i, j) = bad(j, i) = -0.2; break;
      default: bad(i, j) += 0.125; break;
    }
    CHECK_FALSE(validate(bad).empty());
    CHECK_THROWS_AS(WeightedGraph{bad}, InvalidGraphError);
  }
}

TEST_CASE("binarize") {
  const WeightedGraph g(Matrix{{0, 0, 0.3}, {0, 0, 0.7}, {0.3, 0.7, 0}});
  auto b = binarize(g);
  CHECK_FALSE(b.edge(0, 1));
  CHECK(b.edge(0, 2));
  CHECK(b.edge(1, 2));
  CHECK_FALSE(b.edge(2, 2));

  auto half = binarize(g, 0.5);
  CHECK_FALSE(half.edge(0, 2));
  CHECK(half.edge(1, 2));

  CHECK(binarize(WeightedGraph(Matrix(4, 4)), 0.3).edge_count() == 0);
  CHECK_THROWS_AS(binarize(g, -0.1), Error);
}

TEST_CASE("binarize is monotone in eps") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto g = testing::random_graph(9, 0.5, seed);
    const double e1 = 0.02 * static_cast<double>(seed % 10), e2 = e1 + 0.15;
    const auto lo = binarize(g, e1), hi = binarize(g, e2);
    for (std::size_t i = 0; i < 9; ++i)
      for (std::size_t j = 0; j < 9; ++j)
        if (hi.edge(i, j)) CHECK(lo.edge(i, j));
  }
}

TEST_CASE("normalize_adjacency examples") {
  CHECK(normalize_adjacency(Matrix{{0}})(0, 0) == 1.0);

  const auto two = normalize_adjacency(Matrix{{0, 1}, {1, 0}});
  for (double v : two.values()) CHECK(v == doctest::Approx(0.5).epsilon(1e-15));

  // Path 0-1-2, degrees with self-loops (2, 3, 2).
  const auto p = normalize_adjacency(Matrix{{0, 1, 0}, {1, 0, 1}, {0, 1, 0}});
  CHECK(p(0, 0) == doctest::Approx(0.5));
  CHECK(p(1, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(p(0, 1) == doctest::Approx(1.0 / std::sqrt(6.0)));
  CHECK(p(0, 2) == 0.0);
  CHECK(p(2, 1) == doctest::Approx(1.0 / std::sqrt(6.0)));
}

TEST_CASE("normalize_adjacency is symmetric, in (0,1] on its support, spectral radius <= 1") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = testing::random_graph(8, 0.4, seed, seed % 2 == 0);
    const auto a = normalize_adjacency(g.adj());
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = 0; j < 8; ++j) {
        CHECK(a(i, j) == a(j, i));
        if (i == j || g(i, j) > 0) {
          CHECK(a(i, j) > 0.0);
          CHECK(a(i, j) <= 1.0);
        }
      }
    std::vector<double> x(8, 1.0);
    double lambda = 0.0;
    for (int it = 0; it < 500; ++it) {
      std::vector<double> y(8, 0.0);
      for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j) y[i] += a(i, j) * x[j];
      double norm = 0.0;
      for (double v : y) norm += v * v;
      norm = std::sqrt(norm);
      lambda = norm / std::sqrt([&] { double s = 0; for (double v : x) s += v * v; return s; }());
      for (std::size_t i = 0; i < 8; ++i) x[i] = y[i] / norm;
    }
    CHECK(lambda <= 1.0 + 1e-9);
  }
}

TEST_CASE("minmax_normalize examples") {
  const auto a = minmax_normalize(WeightedGraph(Matrix{{0, 2, 0}, {2, 0, 4}, {0, 4, 0}}));
  CHECK(a(0, 1) == 0.5);
  CHECK(a(1, 2) == 1.0);
  CHECK(a(0, 2) == 0.0);

  const auto b = minmax_normalize(WeightedGraph(Matrix{{0, 3}, {3, 0}}));
  CHECK(b(0, 1) == 1.0);

  const WeightedGraph zero(Matrix(3, 3));
  CHECK(minmax_normalize(zero) == zero);
}

TEST_CASE("save then load is the identity and byte-stable on a 35-node synthetic graph") {
  const auto dir = testing::scratch_dir("graph_roundtrip");
  SynthConfig cfg;
  cfg.n_graphs = 1;
  const auto g = generate(cfg, 0).source;
  save_graph(g, dir / "a.csv");
  const auto back = load_graph(dir / "a.csv");
  save_graph(back, dir / "b.csv");
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  for (std::size_t i = 0; i < g.n(); ++i)
    for (std::size_t j = 0; j < g.n(); ++j) CHECK(std::abs(back(i, j) - g(i, j)) <= 5e-9 * g(i, j));
  const auto text = slurp(dir / "a.csv");
  CHECK(text.find('\r') == std::string::npos);
  CHECK(std::count(text.begin(), text.end(), '\n') == 35);
}

TEST_CASE("load_graph on a missing file is an IO error") {
  try {
    load_graph("/nonexistent/dir/g.csv");
    FAIL("expected Io");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
  }
}
