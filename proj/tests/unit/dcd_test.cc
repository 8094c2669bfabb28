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

#include "lge/dcd.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "../oracles.h"
#include "doctest.h"
#include "lge/error.h"
#include "lge/random.h"

namespace lge {
namespace {

TEST_CASE("hinge loss values") {
  const EmbeddingStore zero(GraphMode::kHomogeneous, 3, 3, 2);
  LabeledEdgeSet d;
  d.samples = {{0, 1, +1}, {1, 2, -1}, {0, 2, -1}};
  DcdConfig c;
  CHECK(HingeLoss(zero, d, c) == doctest::Approx(1.0 + 2 * 0.03));

  EmbeddingStore s(GraphMode::kHomogeneous, 2, 2, 1);
  s.left(0)[0] = 1;
  s.left(1)[0] = 2;
  LabeledEdgeSet one;
  one.samples = {{0, 1, +1}};
  c.lambda_reg = 1e-300;
  CHECK(HingeLoss(s, one, c) == doctest::Approx(0.0));

  EmbeddingStore lone(GraphMode::kHomogeneous, 1, 1, 2);
  lone.left(0)[0] = 2;
  c.lambda_reg = 1.0;
  CHECK(HingeLoss(lone, LabeledEdgeSet{}, c) == 2.0);
}

TEST_CASE("single-term subproblem by hand") {
  const std::vector<double> x{1, 0};
  std::vector<double> w(2);
  double alpha = 0;
  DualTerm t{x, +1, 10.0, &alpha};
  SolveSubproblem({&t, 1}, {}, w);
  CHECK(alpha == 1.0);
  CHECK(w == std::vector<double>{1, 0});
  CHECK(SubproblemKktResidual({&t, 1}, w) < 1e-12);

  alpha = 0;
  t.upper = 0.5;
  SolveSubproblem({&t, 1}, {}, w);
  CHECK(alpha == 0.5);
  CHECK(w == std::vector<double>{0.5, 0});
}

TEST_CASE("single-term subproblem agrees with a grid over alpha") {
  for (double upper : {10.0, 0.5}) {
    const std::vector<double> x{1, 0};
    double best = -1e300;
    for (int i = 0; i <= 100000; ++i) {
      const double a = upper * i / 100000.0;
      best = std::max(best, a - 0.5 * a * a);
    }
    double alpha = 0;
    std::vector<double> w(2);
    DualTerm t{x, +1, upper, &alpha};
    SolveSubproblem({&t, 1}, {}, w);
    CHECK(SubproblemDual({&t, 1}) == doctest::Approx(best).epsilon(1e-9));
  }
}

TEST_CASE("kkt residual by definition") {
  const std::vector<double> x{1, 0};
  double alpha = 0;
  const DualTerm t{x, +1, 1.0, &alpha};
  const std::vector<double> w{0.7, 0};  // G = -0.3
  CHECK(SubproblemKktResidual({&t, 1}, w) == doctest::Approx(0.3));
  alpha = 1.0;  // at the bound, G < 0 is fine
  CHECK(SubproblemKktResidual({&t, 1}, w) == 0.0);
  alpha = 0.5;
  CHECK(SubproblemKktResidual({&t, 1}, w) == doctest::Approx(0.3));
}

TEST_CASE("zero vectors are skipped") {
  const std::vector<double> zero{0, 0};
  double alpha = 0;
  DualTerm t{zero, -1, 1.0, &alpha};
  std::vector<double> w(2, 5.0);
  const SolveStats st = SolveSubproblem({&t, 1}, {}, w);
  CHECK(st.skipped_zero == 1);
  CHECK(alpha == 0.0);
  CHECK(w == std::vector<double>{0, 0});
}

TEST_CASE("dual objective never decreases across the inner loop") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t k = 2 + rng.Below(6), dim = 1 + rng.Below(4);
    std::vector<std::vector<double>> xs(k, std::vector<double>(dim));
    std::vector<double> alpha(k, 0.0);
    std::vector<DualTerm> terms;
    for (std::size_t i = 0; i < k; ++i) {
      for (double& v : xs[i]) v = rng.Uniform(-1, 1);
      terms.push_back({xs[i], rng.Bernoulli(0.5) ? 1 : -1, rng.Uniform(0.01, 2),
                       &alpha[i]});
    }
    std::vector<double> w(dim);
    double prev = SubproblemDual(terms);
    for (int pass = 0; pass < 5; ++pass) {
      for (std::size_t i = 0; i < k; ++i) {
        const std::size_t order[] = {i};
        SolveSubproblem(terms, order, w);
        const double now = SubproblemDual(terms);
        CHECK(now >= prev - 1e-12);
        prev = now;
        for (std::size_t j = 0; j < k; ++j) {
          CHECK(alpha[j] >= 0.0);
          CHECK(alpha[j] <= terms[j].upper);
        }
      }
    }
  }
}

TEST_CASE("iterated subproblem solve reaches the exact dual optimum") {
  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t k = 1 + rng.Below(5), dim = 1 + rng.Below(5);
    std::vector<std::vector<double>> xs(k, std::vector<double>(dim));
    std::vector<double> alpha(k, 0.0), upper(k);
    std::vector<DualTerm> terms;
    for (std::size_t i = 0; i < k; ++i) {
      for (double& v : xs[i]) v = rng.Uniform(-1, 1);
      upper[i] = rng.Uniform(0.05, 3);
      terms.push_back(
          {xs[i], rng.Bernoulli(0.5) ? 1 : -1, upper[i], &alpha[i]});
    }
    std::vector<double> w(dim);
    for (int pass = 0; pass < 20000; ++pass) {
      SolveSubproblem(terms, {}, w);
      if (SubproblemKktResidual(terms, w) < 1e-10) break;
    }
    Eigen::MatrixXd q(k, k);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        double dot = 0;
        for (std::size_t d = 0; d < dim; ++d) dot += xs[i][d] * xs[j][d];
        q(i, j) = terms[i].y * terms[j].y * dot;
      }
    }
    CAPTURE(trial);
    CHECK(SubproblemKktResidual(terms, w) < 1e-8);
    const double exact = oracle::BoxQpDualOptimum(q, upper);
    CHECK(std::abs(SubproblemDual(terms) - exact) < 1e-6);
    // Strong duality with the primal at w.
    CHECK(std::abs(SubproblemPrimal(terms, w) - exact) < 1e-6);
  }
}

TEST_CASE("exact dual oracle agrees with a grid search") {
  Rng rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 1 + static_cast<int>(rng.Below(2));
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(k, 3);
    for (int i = 0; i < k; ++i)
      x.row(i) *= rng.Uniform(0.2, 2) * (rng.Bernoulli(0.5) ? 1 : -1);
    const Eigen::MatrixXd q = x * x.transpose();
    std::vector<double> upper(k);
    for (double& u : upper) u = rng.Uniform(0.05, 3);
    // Coarse grid, then a finer one around the best point.
    auto f = [&](double a0, double a1) {
      Eigen::VectorXd a(k);
      a(0) = a0;
      if (k > 1) a(1) = a1;
      return a.sum() - 0.5 * a.dot(q * a);
    };
    const int steps = 400;
    double best = -1e300, b0 = 0, b1 = 0;
    for (int i = 0; i <= steps; ++i) {
      for (int j = 0; j <= (k > 1 ? steps : 0); ++j) {
        const double a0 = upper[0] * i / steps;
        const double a1 = k > 1 ? upper[1] * j / steps : 0.0;
        if (f(a0, a1) > best) best = f(a0, a1), b0 = a0, b1 = a1;
      }
    }
    const double h0 = upper[0] / steps, h1 = k > 1 ? upper[1] / steps : 0.0;
    for (int i = -steps; i <= steps; ++i) {
      for (int j = (k > 1 ? -steps : 0); j <= (k > 1 ? steps : 0); ++j) {
        const double a0 = std::clamp(b0 + h0 * i / steps, 0.0, upper[0]);
        const double a1 =
            k > 1 ? std::clamp(b1 + h1 * j / steps, 0.0, upper[1]) : 0.0;
        best = std::max(best, f(a0, a1));
      }
    }
    CHECK(std::abs(oracle::BoxQpDualOptimum(q, upper) - best) < 1e-6);
    CHECK(oracle::BoxQpDualOptimum(q, upper) >= best - 1e-12);
  }
}

TEST_CASE("vertex without samples goes to zero") {
  EmbeddingStore s(GraphMode::kHomogeneous, 3, 3, 2);
  s.left(2)[0] = 4;
  LabeledEdgeSet d;
  d.samples = {{0, 1, +1}};
  DcdProblem p(d, s);
  DcdConfig c;
  SolveVertex(Side::kLeft, 2, s, p, c, nullptr);
  CHECK(s.left(2)[0] == 0.0);
}

TEST_CASE("zero sweeps leave the store unchanged") {
  auto s = InitUniform(GraphMode::kHomogeneous, 3, 3, 2, -0.1, 0.1, 1);
  const auto before = s;
  LabeledEdgeSet d;
  d.samples = {{0, 1, +1}};
  DcdConfig c;
  c.sweeps = 0;
  TrainDcd(d, s, c);
  CHECK(s == before);
}

TEST_CASE("lambda_reg must be positive") {
  DcdConfig c;
  c.lambda_reg = 0;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
  c.lambda_reg = 1e-3;
  CHECK_NOTHROW(c.Validate());
}

TEST_CASE("path graph margins satisfy the box KKT conditions") {
  // Path a-b with one sampled negative (a, c).
  LabeledEdgeSet d;
  d.samples = {{0, 1, +1}, {0, 2, -1}};
  auto s = InitUniform(GraphMode::kHomogeneous, 3, 3, 4, -0.1, 0.1, 2);
  DcdConfig c;
  c.lambda_reg = 3;
  c.sweeps = 20;
  DcdProblem p(d, s);
  Rng rng(1);
  for (int sweep = 0; sweep < c.sweeps; ++sweep) {
    for (VertexId v = 0; v < 3; ++v) SolveVertex(Side::kLeft, v, s, p, c, &rng);
  }
  for (std::size_t i = 0; i < d.size(); ++i) {
    const Sample& x = d.samples[i];
    const double margin = x.y * s.Dot(x.a, x.b);
    const double u = c.upper(x.y);
    const bool at_bound = p.duals.at(i, 0) == u || p.duals.at(i, 1) == u;
    CHECK((margin >= 1 - c.kkt_tol || at_bound));
  }
  CHECK(DualsFeasible(p, c));
}

TEST_CASE("train_dcd keeps the primal-dual link and dual boxes") {
  GeneratorConfig gc;
  gc.kind = GeneratorKind::kSbm;
  gc.n = 120;
  gc.blocks = 3;
  gc.p_in = 0.2;
  gc.p_out = 0.01;
  gc.seed = 1;
  const Graph g = Generate(gc);
  NegativeSamplingOptions neg;
  neg.seed = 2;
  const auto train =
      SampleNegatives(g, SplitEdges(g, {0.5, 0.25, 0.25}, 3).train, neg);
  auto s = InitUniform(GraphMode::kHomogeneous, 120, 120, 8, -0.1, 0.1, 4);
  DcdConfig c;
  c.lambda_reg = 3;
  c.sweeps = 10;
  const DcdResult r = TrainDcd(train, s, c);
  CHECK(r.trace.records.size() == 10);
  CHECK(r.trace.trainer == TrainerKind::kDcd);
  CHECK(r.diagnostics.duals_feasible);
  CHECK(r.diagnostics.max_primal_dual_gap < 1e-10);
  CHECK(r.trace.records.back().loss ==
        doctest::Approx(HingeLoss(s, train, c)).epsilon(1e-12));

  // More inner passes push the residual down.
  auto s2 = InitUniform(GraphMode::kHomogeneous, 120, 120, 8, -0.1, 0.1, 4);
  c.max_inner_passes = 50;
  c.kkt_tol = 1e-6;
  const DcdResult r2 = TrainDcd(train, s2, c);
  CHECK(r2.diagnostics.mean_kkt < r.diagnostics.mean_kkt);
}

TEST_CASE("bipartite dcd solves both sides") {
  LabeledEdgeSet d;
  d.mode = GraphMode::kBipartite;
  d.samples = {{0, 0, +1}, {1, 1, +1}, {0, 1, -1}};
  auto s = InitUniform(GraphMode::kBipartite, 2, 2, 3, -0.1, 0.1, 1);
  DcdConfig c;
  c.lambda_reg = 0.1;
  c.sweeps = 30;
  const DcdResult r = TrainDcd(d, s, c);
  CHECK(s.Dot(0, 0) > 0.5);
  CHECK(s.Dot(0, 1) < 0.0);
  CHECK(r.diagnostics.duals_feasible);
}

}  // namespace
}  // namespace lge
