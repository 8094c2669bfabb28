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

#include "lge/baselines.h"

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "lge/error.h"
#include "lge/random.h"

namespace lge {
namespace {

TEST_CASE("common neighbors by enumeration") {
  const Graph tri = Graph::Homogeneous(3, {{0, 1}, {1, 2}, {0, 2}});
  CHECK(CommonNeighborScore(tri, 0, 1) == 1);
  const Graph pair = Graph::Homogeneous(4, {{0, 1}, {2, 3}});
  CHECK(CommonNeighborScore(pair, 0, 2) == 0);
  CHECK(CommonNeighborScore(pair, 0, 1) == 0);
  const Graph star = Graph::Homogeneous(4, {{0, 1}, {0, 2}, {0, 3}});
  CHECK(CommonNeighborScore(star, 0, 1) == 0);
  CHECK(CommonNeighborScore(star, 1, 2) == 1);
}

TEST_CASE("common neighbors are symmetric") {
  GeneratorConfig gc;
  gc.n = 60;
  gc.expected_edges = 300;
  gc.seed = 4;
  const Graph g = Generate(gc);
  for (VertexId a = 0; a < 60; ++a) {
    for (VertexId b = 0; b < 60; ++b) {
      const std::size_t s = CommonNeighborScore(g, a, b);
      CHECK(s == CommonNeighborScore(g, b, a));
      std::size_t brute = 0;
      for (VertexId c = 0; c < 60; ++c)
        brute += g.HasEdge(a, c) && g.HasEdge(b, c);
      CHECK(s == brute);
    }
  }
}

TEST_CASE("common neighbors reject bipartite graphs") {
  const Graph g = Graph::FromEdges(GraphMode::kBipartite, 2, 2, {{0, 1}});
  CHECK_THROWS_AS(CommonNeighborScore(g, 0, 1), ConfigError);
}

TEST_CASE("common neighbor ap") {
  const Graph tri = Graph::Homogeneous(4, {{0, 1}, {1, 2}, {0, 2}});
  LabeledEdgeSet eval;
  eval.samples = {{0, 1, +1}, {0, 3, -1}, {2, 3, -1}};
  const ApResult r = CommonNeighborAp(tri, eval, 1);
  CHECK(r.value == 1.0);
  CHECK(r.n_pos == 1);
}

Eigen::MatrixXd Dense(const Graph& g) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(g.n_left(), g.n_right());
  for (const Edge& e : g.edges()) {
    a(e.a, e.b) = 1;
    if (g.homogeneous()) a(e.b, e.a) = 1;
  }
  return a;
}

TEST_CASE("svd of a single edge") {
  const Graph g = Graph::Homogeneous(2, {{0, 1}});
  SvdOptions o;
  o.rank = 1;
  const SvdFactors f1 = TruncatedSvd(g, o);
  CHECK(f1.values[0] == doctest::Approx(1.0));
  // sigma_1 = sigma_2, so the rank-1 reconstruction is not unique; rank 2
  // recovers the matrix.
  o.rank = 2;
  const SvdFactors f = TruncatedSvd(g, o);
  CHECK(f.values[1] == doctest::Approx(1.0));
  CHECK(f.factors.Dot(0, 1) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(f.factors.Dot(1, 0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(f.factors.Dot(0, 0)) < 1e-8);
}

TEST_CASE("svd of k4") {
  std::vector<Edge> e;
  for (VertexId a = 0; a < 4; ++a) {
    for (VertexId b = a + 1; b < 4; ++b) e.push_back({a, b});
  }
  SvdOptions o;
  o.rank = 1;
  const SvdFactors f = TruncatedSvd(Graph::Homogeneous(4, e), o);
  CHECK(f.values[0] == doctest::Approx(3.0).epsilon(1e-10));
  // Top component of J - I is the constant vector: every pair scores 3/4.
  CHECK(f.factors.Dot(0, 1) == doctest::Approx(0.75).epsilon(1e-8));
}

TEST_CASE("svd matches a dense decomposition") {
  Rng rng(8);
  for (int trial = 0; trial < 6; ++trial) {
    const bool bip = trial % 2;
    const std::size_t n = 20 + rng.Below(180);
    Graph g;
    if (bip) {
      std::vector<Edge> e;
      const std::size_t nr = 10 + rng.Below(100);
      for (int i = 0; i < 3 * static_cast<int>(n); ++i) {
        e.push_back({static_cast<VertexId>(rng.Below(n)),
                     static_cast<VertexId>(rng.Below(nr))});
      }
      g = Graph::FromEdges(GraphMode::kBipartite, n, nr, e);
    } else {
      GeneratorConfig gc;
      gc.n = n;
      gc.expected_edges = 3.0 * n;
      gc.seed = trial;
      g = Generate(gc);
    }
    SvdOptions o;
    o.rank = 5;
    o.seed = trial;
    o.tol = 1e-10;
    o.max_iterations = 20000;
    const SvdFactors f = TruncatedSvd(g, o);
    const Eigen::MatrixXd a = Dense(g);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU);
    CAPTURE(trial);
    CHECK(f.converged);
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(std::abs(f.values[i] - svd.singularValues()(i)) < 1e-6);
      CHECK(f.values[i] >= 0);
      if (i > 0) CHECK(f.values[i] <= f.values[i - 1]);
    }
    // Recover u_1 from the factors and compare up to sign when isolated.
    const double gap = svd.singularValues()(0) - svd.singularValues()(1);
    if (gap > 1e-3) {
      Eigen::VectorXd u(a.rows());
      for (Eigen::Index v = 0; v < a.rows(); ++v) {
        u(v) = f.factors.left(static_cast<VertexId>(v))[0] /
               std::sqrt(f.values[0]);
      }
      CHECK(std::abs(std::abs(u.dot(svd.matrixU().col(0))) - 1.0) < 1e-6);
    }
  }
}

TEST_CASE("svd is deterministic and validates rank") {
  GeneratorConfig gc;
  gc.n = 50;
  gc.expected_edges = 150;
  gc.seed = 1;
  const Graph g = Generate(gc);
  SvdOptions o;
  o.rank = 4;
  o.seed = 3;
  CHECK(TruncatedSvd(g, o).factors == TruncatedSvd(g, o).factors);
  o.rank = 0;
  CHECK_THROWS_AS(TruncatedSvd(g, o), ConfigError);
  o.rank = 51;
  CHECK_THROWS_AS(TruncatedSvd(g, o), ConfigError);
}

TEST_CASE("svd reports non-convergence") {
  GeneratorConfig gc;
  gc.n = 100;
  gc.expected_edges = 400;
  gc.seed = 2;
  SvdOptions o;
  o.rank = 10;
  o.oversample = 0;
  o.max_iterations = 1;
  o.tol = 1e-14;
  CHECK_THROWS_AS(TruncatedSvd(Generate(gc), o), NumericalError);
}

}  // namespace
}  // namespace lge
