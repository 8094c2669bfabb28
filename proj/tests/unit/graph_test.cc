// Copyright 2026 The LGE Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lge/graph.h"

#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "lge/error.h"

namespace lge {
namespace {

Graph Parse(const std::string& text, GraphMode mode = GraphMode::kHomogeneous,
            bool symmetrize = false) {
  std::istringstream in(text);
  LoadOptions opts;
  opts.symmetrize = symmetrize;
  return ParseEdgeList(in, mode, opts);
}

TEST_CASE("edge list dedups reversed duplicates") {
  const Graph g = Parse("0 1\n1 2\n1 0\n");
  CHECK(g.n_left() == 3);
  CHECK(g.num_edges() == 2);
  CHECK(g.HasEdge(1, 0));
  CHECK(g.HasEdge(2, 1));
  CHECK_FALSE(g.HasEdge(0, 2));
}

TEST_CASE("empty edge list") {
  const Graph g = Parse("");
  CHECK(g.n_left() == 0);
  CHECK(g.num_edges() == 0);
}

TEST_CASE("edge list errors carry line numbers") {
  try {
    Parse("3 3\n");
    FAIL("expected a self-loop error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
  }
  try {
    Parse("# comment\n0 1\n0 x\n");
    FAIL("expected a malformed-line error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(Parse("0 99999999999\n"), ParseError);
  CHECK_THROWS_AS(Parse("0 1 2\n"), ParseError);
}

TEST_CASE("directed files need symmetrize") {
  CHECK_THROWS_AS(Parse("# directed\n0 1\n1 0\n"), ParseError);
  const Graph g =
      Parse("# directed\n0 1\n1 0\n2 1\n", GraphMode::kHomogeneous, true);
  CHECK(g.num_edges() == 2);
}

TEST_CASE("vertices header keeps isolated vertices") {
  const Graph g = Parse("# vertices 10\n0 1\n");
  CHECK(g.n_left() == 10);
}

TEST_CASE("bipartite edges keep orientation") {
  const Graph g = Parse("0 0\n0 2\n1 0\n", GraphMode::kBipartite);
  CHECK(g.n_left() == 2);
  CHECK(g.n_right() == 3);
  CHECK(g.HasEdge(0, 0));
  CHECK(g.HasEdge(1, 0));
  CHECK_FALSE(g.HasEdge(0, 1));
  CHECK(g.right_neighbors(0).size() == 2);
}

TEST_CASE("homogeneous adjacency is symmetric") {
  GeneratorConfig c;
  c.kind = GeneratorKind::kErdosRenyi;
  c.n = 60;
  c.expected_edges = 200;
  c.seed = 4;
  const Graph g = Generate(c);
  for (VertexId a = 0; a < g.n_left(); ++a) {
    for (VertexId b : g.neighbors(a)) {
      CHECK(a != b);
      bool back = false;
      for (VertexId c2 : g.neighbors(b)) back |= c2 == a;
      CHECK(back);
    }
  }
}

TEST_CASE("d-regular generator") {
  GeneratorConfig c;
  c.kind = GeneratorKind::kDRegular;
  c.n = 4;
  c.degree = 2;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    c.seed = seed;
    const Graph g = Generate(c);
    CHECK(g.num_edges() == 4);
    for (VertexId v = 0; v < 4; ++v) CHECK(g.degree(v) == 2);
  }
  c.n = 200;
  c.degree = 4;
  const Graph big = Generate(c);
  for (VertexId v = 0; v < 200; ++v) CHECK(big.degree(v) == 4);

  c.n = 5;
  c.degree = 3;  // n * d odd
  CHECK_THROWS_AS(Generate(c), ConfigError);
  c.n = 4;
  c.degree = 4;  // d >= n
  CHECK_THROWS_AS(Generate(c), ConfigError);
}

TEST_CASE("erdos-renyi with zero edges") {
  GeneratorConfig c;
  c.kind = GeneratorKind::kErdosRenyi;
  c.n = 100;
  c.expected_edges = 0;
  CHECK(Generate(c).num_edges() == 0);
}

TEST_CASE("erdos-renyi edge count is near its expectation") {
  GeneratorConfig c;
  c.kind = GeneratorKind::kErdosRenyi;
  c.n = 400;
  c.expected_edges = 2000;
  c.seed = 11;
  const double m = static_cast<double>(Generate(c).num_edges());
  CHECK(std::abs(m - 2000.0) < 5 * std::sqrt(2000.0));
}

TEST_CASE("sbm with p_in 1 and p_out 0 gives disjoint cliques") {
  GeneratorConfig c;
  c.kind = GeneratorKind::kSbm;
  c.n = 30;
  c.blocks = 3;
  c.p_in = 1.0;
  c.p_out = 0.0;
  const Graph g = Generate(c);
  CHECK(g.num_edges() == 135);
  for (const Edge& e : g.edges()) CHECK(SbmBlock(e.a, 3) == SbmBlock(e.b, 3));
}

TEST_CASE("sbm probabilities hit the requested degree") {
  const auto [p_in, p_out] = SbmProbabilitiesForDegree(1000, 10, 20.0, 0.95);
  CHECK(p_in == doctest::Approx(19.0 / 99.0));
  CHECK(p_out == doctest::Approx(1.0 / 900.0));
}

TEST_CASE("generator validation") {
  GeneratorConfig c;
  c.kind = GeneratorKind::kSbm;
  c.n = 10;
  c.blocks = 2;
  c.p_in = 1.5;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
  CHECK(ParseGeneratorKind("d_regular") == GeneratorKind::kDRegular);
  CHECK_THROWS_AS(ParseGeneratorKind("ba"), ConfigError);
}

TEST_CASE("generators are deterministic per seed") {
  GeneratorConfig c;
  c.kind = GeneratorKind::kSbm;
  c.n = 100;
  c.blocks = 4;
  c.p_in = 0.2;
  c.p_out = 0.01;
  c.seed = 9;
  const Graph a = Generate(c);
  const Graph b = Generate(c);
  CHECK(std::equal(a.edges().begin(), a.edges().end(), b.edges().begin(),
                   b.edges().end()));
}

TEST_CASE("largest remainder split sizes") {
  CHECK(LargestRemainderSizes(100, {0.5, 0.25, 0.25}) ==
        std::array<std::size_t, 3>{50, 25, 25});
  CHECK(LargestRemainderSizes(10, {2.0 / 3, 1.0 / 6, 1.0 / 6}) ==
        std::array<std::size_t, 3>{7, 2, 1});
  CHECK(LargestRemainderSizes(7, {1, 0, 0}) ==
        std::array<std::size_t, 3>{7, 0, 0});
  CHECK_THROWS_AS(LargestRemainderSizes(10, {0.5, 0.5, 0.5}), ConfigError);
}

TEST_CASE("split partitions the positives") {
  GeneratorConfig c;
  c.kind = GeneratorKind::kErdosRenyi;
  c.n = 50;
  c.expected_edges = 100;
  c.seed = 3;
  const Graph g = Generate(c);
  const Split s = SplitEdges(g, {0.5, 0.25, 0.25}, 7);
  std::multiset<Edge> seen;
  for (const auto* part : {&s.train, &s.validation, &s.test}) {
    CHECK(part->num_negative() == 0);
    for (const Sample& x : part->samples) seen.insert({x.a, x.b});
  }
  CHECK(seen.size() == g.num_edges());
  CHECK(std::set<Edge>(seen.begin(), seen.end()).size() == g.num_edges());
  for (const Edge& e : g.edges()) CHECK(seen.count(e) == 1);

  const Split all = SplitEdges(g, {1, 0, 0}, 7);
  CHECK(all.train.size() == g.num_edges());
  CHECK(all.test.empty());
}

TEST_CASE("negative sampling") {
  GeneratorConfig c;
  c.kind = GeneratorKind::kErdosRenyi;
  c.n = 100;
  c.expected_edges = 400;
  c.seed = 5;
  const Graph g = Generate(c);
  const Split s = SplitEdges(g, {0.5, 0.25, 0.25}, 1);
  LabeledEdgeSet ten;
  ten.samples.assign(s.train.samples.begin(), s.train.samples.begin() + 10);
  NegativeSamplingOptions opts;
  opts.seed = 2;
  const LabeledEdgeSet out = SampleNegatives(g, ten, opts);
  CHECK(out.num_positive() == 10);
  CHECK(out.num_negative() == 40);

  const LabeledEdgeSet full = SampleNegatives(g, s.train, opts);
  for (const Sample& x : full.samples) {
    if (x.y < 0) {
      CHECK(x.a != x.b);
      CHECK_FALSE(g.HasEdge(x.a, x.b));
    }
  }
  opts.ratio = 0;
  CHECK(SampleNegatives(g, ten, opts).samples == ten.samples);
}

TEST_CASE("negative sampling on a complete graph fails") {
  std::vector<Edge> edges;
  for (VertexId a = 0; a < 5; ++a) {
    for (VertexId b = a + 1; b < 5; ++b) edges.push_back({a, b});
  }
  const Graph k5 = Graph::Homogeneous(5, edges);
  const LabeledEdgeSet pos = LabeledEdgeSet::Positives(k5.mode(), k5.edges());
  CHECK_THROWS_AS(SampleNegatives(k5, pos, {}), ConfigError);
}

}  // namespace
}  // namespace lge
