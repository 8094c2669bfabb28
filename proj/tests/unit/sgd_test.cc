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

#include "lge/sgd.h"

#include <cmath>
#include <vector>

#include "doctest.h"
#include "lge/error.h"
#include "lge/incidence.h"
#include "lge/numeric.h"
#include "lge/random.h"

namespace lge {
namespace {

LabeledEdgeSet Samples(std::initializer_list<Sample> s) {
  LabeledEdgeSet d;
  d.samples = s;
  return d;
}

// Independent sigmoid for the hand simulation.
double RefSigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

TEST_CASE("loss at zero embeddings") {
  const EmbeddingStore s(GraphMode::kHomogeneous, 4, 4, 3);
  const auto d =
      Samples({{0, 1, +1}, {1, 2, +1}, {0, 3, -1}, {2, 3, -1}, {1, 3, -1}});
  SgdConfig c;
  const double expected = (c.lambda_pos * 2 + c.lambda_neg * 3) * std::log(2.0);
  CHECK(SgdLoss(s, d, c) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("loss of a pure regularizer") {
  EmbeddingStore s(GraphMode::kHomogeneous, 1, 1, 2);
  s.left(0)[0] = 1;
  s.left(0)[1] = 1;
  SgdConfig c;
  c.lambda_reg = 0.5;
  CHECK(SgdLoss(s, LabeledEdgeSet{}, c) == 1.0);
}

TEST_CASE("loss for a large positive margin") {
  EmbeddingStore s(GraphMode::kHomogeneous, 2, 2, 1);
  s.left(0)[0] = 2;
  s.left(1)[0] = 5;
  SgdConfig c;
  // log1p(exp(-10)) to double precision.
  CHECK(SgdLoss(s, Samples({{0, 1, +1}}), c) ==
        doctest::Approx(4.5398899216870535e-05).epsilon(1e-12));
}

TEST_CASE("log sigmoid is finite far out") {
  CHECK(LogSigmoid(-800) == -800);
  CHECK(LogSigmoid(800) == doctest::Approx(0.0));
  CHECK(std::isfinite(LogSigmoid(-1e300)));
  CHECK(Sigmoid(-800) >= 0.0);
  CHECK(Sigmoid(800) == 1.0);
}

TEST_CASE("vertex gradient simple cases") {
  EmbeddingStore zero(GraphMode::kHomogeneous, 3, 3, 2);
  const VertexId pos[] = {1};
  const VertexId neg[] = {2};
  for (double g : VertexGradient(zero, Side::kLeft, 0, pos, neg, {})) {
    CHECK(g == 0.0);
  }
  EmbeddingStore one(GraphMode::kHomogeneous, 1, 1, 2);
  one.left(0)[0] = 1;
  SgdConfig c;
  c.lambda_reg = 0.3;
  const auto g = VertexGradient(one, Side::kLeft, 0, {}, {}, c);
  CHECK(g[0] == doctest::Approx(0.6));
  CHECK(g[1] == 0.0);
}

// Central differences of SgdLoss against VertexGradient.
double GradientError(std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t n = 2 + rng.Below(7);
  const std::size_t dim = 1 + rng.Below(4);
  EmbeddingStore s =
      InitUniform(GraphMode::kHomogeneous, n, n, dim, -1, 1, seed + 100);
  LabeledEdgeSet d;
  const std::size_t m = 1 + rng.Below(12);
  for (std::size_t i = 0; i < m; ++i) {
    VertexId a = static_cast<VertexId>(rng.Below(n));
    VertexId b = static_cast<VertexId>(rng.Below(n - 1));
    if (b >= a) ++b;
    d.samples.push_back({a, b, rng.Bernoulli(0.4) ? +1 : -1});
  }
  SgdConfig c;
  c.lambda_pos = rng.Uniform(0.5, 2);
  c.lambda_neg = rng.Uniform(0.01, 1);
  c.lambda_reg = rng.Uniform(0, 1);
  const VertexId u = static_cast<VertexId>(rng.Below(n));
  std::vector<VertexId> pos, neg;
  for (const Sample& x : d.samples) {
    if (x.a != u && x.b != u) continue;
    (x.y > 0 ? pos : neg).push_back(x.a == u ? x.b : x.a);
  }
  const auto g = VertexGradient(s, Side::kLeft, u, pos, neg, c);
  double err = 0.0, norm = 0.0;
  const double h = 1e-5;
  for (std::size_t k = 0; k < dim; ++k) {
    const double keep = s.left(u)[k];
    s.left(u)[k] = keep + h;
    const double up = SgdLoss(s, d, c);
    s.left(u)[k] = keep - h;
    const double down = SgdLoss(s, d, c);
    s.left(u)[k] = keep;
    const double fd = (up - down) / (2 * h);
    err += (fd - g[k]) * (fd - g[k]);
    norm += g[k] * g[k];
  }
  return std::sqrt(err) / std::max(std::sqrt(norm), 1e-8);
}

TEST_CASE("vertex gradient matches finite differences") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    CAPTURE(seed);
    CHECK(GradientError(seed) < 1e-6);
  }
}

TEST_CASE("zero epochs leave the store unchanged") {
  const Graph g = Graph::Homogeneous(3, {{0, 1}, {1, 2}});
  auto s = InitUniform(GraphMode::kHomogeneous, 3, 3, 4, -0.1, 0.1, 1);
  const auto before = s;
  SgdConfig c;
  c.epochs = 0;
  const TrainTrace t = TrainSgd(g, Samples({{0, 1, +1}}), s, c);
  CHECK(t.records.empty());
  CHECK(s == before);
}

TEST_CASE("two-step hand simulation of one sample") {
  const Graph g = Graph::Homogeneous(2, {{0, 1}});
  for (StepClock clock : {StepClock::kUpdate, StepClock::kEpoch}) {
    EmbeddingStore s(GraphMode::kHomogeneous, 2, 2, 1);
    s.left(0)[0] = 0.1;
    s.left(1)[0] = 0.1;
    SgdConfig c;
    c.epochs = 1;
    c.clock = clock;
    TrainSgd(g, Samples({{0, 1, +1}}), s, c);
    const double gamma = 1.0 / std::sqrt(1.0 + 1.0);
    const double x0 = 0.1 + gamma * RefSigmoid(-0.01) * 0.1;
    const double x1 = 0.1 + gamma * RefSigmoid(-x0 * 0.1) * x0;
    CHECK(s.left(0)[0] == doctest::Approx(x0).epsilon(1e-14));
    CHECK(s.left(1)[0] == doctest::Approx(x1).epsilon(1e-14));
  }
}

TEST_CASE("regularizer pull applies once per vertex per epoch") {
  // Vertex 0 has two samples whose logistic terms vanish (lambda_neg tiny and
  // scores zero), so only the regularizer acts: x <- x(1 - 2 g l_r / 2)^2.
  const Graph g = Graph::Homogeneous(3, {{0, 1}});
  EmbeddingStore s(GraphMode::kHomogeneous, 3, 3, 2);
  s.left(0)[0] = 1.0;
  SgdConfig c;
  c.epochs = 1;
  c.lambda_reg = 0.1;
  c.lambda_neg = 1e-300;
  c.lambda_pos = 1e-300;
  TrainSgd(g, Samples({{0, 1, -1}, {0, 2, -1}}), s, c);
  const double gamma = 1.0 / std::sqrt(2.0);
  const double shrink = 1.0 - gamma * 2 * c.lambda_reg / 2;
  CHECK(s.left(0)[0] == doctest::Approx(shrink * shrink).epsilon(1e-12));
}

TEST_CASE("kappa weights") {
  const auto d = Samples(
      {{0, 1, +1}, {0, 2, +1}, {0, 3, -1}, {0, 4, -1}, {0, 5, -1}, {0, 6, -1}});
  const Incidence inc(d, 7, 7);
  SgdConfig c;
  CHECK(SampleWeights(d, inc, c)[3] == c.lambda_neg);
  c.kappa = 2.0;
  const auto w = SampleWeights(d, inc, c);
  CHECK(w[0] == c.lambda_pos);
  CHECK(w[2] == doctest::Approx(2.0 * 2 / 4));
}

TEST_CASE("config validation") {
  SgdConfig c;
  c.lambda_pos = 0;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
  c = {};
  c.lambda_reg = -1;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
  c = {};
  c.lr_c = 0;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
  c = {};
  c.epochs = -1;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
}

struct SmallBench {
  Graph graph;
  LabeledEdgeSet train;

  SmallBench() {
    GeneratorConfig gc;
    gc.kind = GeneratorKind::kSbm;
    gc.n = 200;
    gc.blocks = 4;
    std::tie(gc.p_in, gc.p_out) = SbmProbabilitiesForDegree(200, 4, 10, 0.9);
    gc.seed = 3;
    graph = Generate(gc);
    NegativeSamplingOptions neg;
    neg.seed = 4;
    train = SampleNegatives(graph,
                            SplitEdges(graph, {0.5, 0.25, 0.25}, 5).train, neg);
  }
};

TEST_CASE("training is bit-reproducible single-threaded") {
  const SmallBench b;
  SgdConfig c;
  c.epochs = 5;
  c.order_seed = 8;
  auto s1 = InitUniform(GraphMode::kHomogeneous, 200, 200, 16, -0.1, 0.1, 1);
  auto s2 = s1;
  const TrainTrace t1 = TrainSgd(b.graph, b.train, s1, c);
  const TrainTrace t2 = TrainSgd(b.graph, b.train, s2, c);
  CHECK(s1 == s2);
  REQUIRE(t1.records.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(t1.records[i].epoch == static_cast<int>(i + 1));
    CHECK(t1.records[i].loss == t2.records[i].loss);
  }
}

TEST_CASE("trace reports mean per-vertex gradient norm and loss") {
  const SmallBench b;
  SgdConfig c;
  c.epochs = 2;
  auto s = InitUniform(GraphMode::kHomogeneous, 200, 200, 8, -0.1, 0.1, 1);
  const TrainTrace t = TrainSgd(b.graph, b.train, s, c);
  // Oracle: average of per-vertex gradients built from the sample list.
  std::vector<std::vector<VertexId>> pos(200), neg(200);
  for (const Sample& x : b.train.samples) {
    (x.y > 0 ? pos : neg)[x.a].push_back(x.b);
    (x.y > 0 ? pos : neg)[x.b].push_back(x.a);
  }
  double sum = 0.0;
  for (VertexId v = 0; v < 200; ++v) {
    const auto g = VertexGradient(s, Side::kLeft, v, pos[v], neg[v], c);
    sum += std::sqrt(SquaredNorm(g));
  }
  CHECK(t.records.back().avg_grad_norm ==
        doctest::Approx(sum / 200).epsilon(1e-10));
  CHECK(t.records.back().loss ==
        doctest::Approx(SgdLoss(s, b.train, c)).epsilon(1e-12));
  CHECK(AverageGradientNorm(s, b.train, c) ==
        doctest::Approx(sum / 200).epsilon(1e-10));
}

TEST_CASE("norm regularization shrinks final norms") {
  const SmallBench b;
  SgdConfig c;
  c.epochs = 20;
  auto free = InitUniform(GraphMode::kHomogeneous, 200, 200, 16, -0.1, 0.1, 1);
  auto reg = free;
  TrainSgd(b.graph, b.train, free, c);
  c.lambda_reg = 1.0;
  TrainSgd(b.graph, b.train, reg, c);
  CHECK(ComputeNormReport(reg).combined.avg_sq_norm <
        ComputeNormReport(free).combined.avg_sq_norm);
}

TEST_CASE("non-finite values abort with a diagnostic") {
  const Graph g = Graph::Homogeneous(2, {{0, 1}});
  EmbeddingStore s(GraphMode::kHomogeneous, 2, 2, 1);
  s.left(0)[0] = 1e200;
  s.left(1)[0] = 1e200;
  SgdConfig c;
  c.epochs = 1;
  c.lambda_reg = 1.0;
  CHECK_THROWS_AS(TrainSgd(g, Samples({{0, 1, -1}}), s, c), NumericalError);
}

TEST_CASE("bipartite training updates both matrices") {
  const Graph g =
      Graph::FromEdges(GraphMode::kBipartite, 3, 2, {{0, 0}, {1, 1}, {2, 0}});
  auto s = InitUniform(GraphMode::kBipartite, 3, 2, 4, -0.1, 0.1, 2);
  const auto before = s;
  LabeledEdgeSet d =
      LabeledEdgeSet::Positives(GraphMode::kBipartite, g.edges());
  SgdConfig c;
  c.epochs = 3;
  TrainSgd(g, d, s, c);
  CHECK(s.right(0)[0] != before.right(0)[0]);
  CHECK(s.left(2)[0] != before.left(2)[0]);
}

TEST_CASE("resampled negatives avoid edges and keep the ratio") {
  const SmallBench b;
  SgdConfig c;
  c.epochs = 2;
  c.resample_negatives = true;
  c.resample_seed = 3;
  auto s = InitUniform(GraphMode::kHomogeneous, 200, 200, 8, -0.1, 0.1, 1);
  CHECK_NOTHROW(TrainSgd(b.graph, b.train, s, c));
  CHECK(s.AllFinite());
}

}  // namespace
}  // namespace lge
