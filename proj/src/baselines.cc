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
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>

#include "lge/error.h"
#include "lge/random.h"

namespace lge {

std::size_t CommonNeighborScore(const Graph& g, VertexId a, VertexId b) {
  if (!g.homogeneous()) {
    throw ConfigError(
        "common neighbors: bipartite graphs have no shared neighborhoods");
  }
  if (a >= g.n_left() || b >= g.n_left()) {
    throw ConfigError("common neighbors: vertex id out of range");
  }
  const auto na = g.neighbors(a);
  const auto nb = g.neighbors(b);
  std::size_t count = 0;
  auto i = na.begin();
  auto j = nb.begin();
  while (i != na.end() && j != nb.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

ApResult CommonNeighborAp(const Graph& g, const LabeledEdgeSet& eval,
                          std::uint64_t shuffle_seed) {
  std::vector<ScoredLabel> preds;
  preds.reserve(eval.size());
  for (const Sample& s : eval.samples) {
    preds.push_back(
        {static_cast<double>(CommonNeighborScore(g, s.a, s.b)), s.y});
  }
  return ShuffledAp(std::move(preds), shuffle_seed);
}

namespace {

using Matrix = Eigen::MatrixXd;
using Sparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;

Sparse Adjacency(const Graph& g) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(g.num_edges() * 2);
  for (const Edge& e : g.edges()) {
    t.emplace_back(e.a, e.b, 1.0);
    if (g.homogeneous()) t.emplace_back(e.b, e.a, 1.0);
  }
  Sparse a(g.n_left(), g.n_right());
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

Matrix Orthonormalize(const Matrix& m) {
  Eigen::HouseholderQR<Matrix> qr(m);
  return qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
}

}  // namespace

SvdFactors TruncatedSvd(const Graph& g, const SvdOptions& options) {
  const std::size_t min_side = std::min(g.n_left(), g.n_right());
  if (options.rank < 1 || options.rank > min_side) {
    throw ConfigError("svd: rank must be in [1, " + std::to_string(min_side) +
                      "]");
  }
  if (!(options.tol > 0.0)) throw ConfigError("svd: tol must be > 0");
  const Sparse a = Adjacency(g);
  const Sparse at = a.transpose();
  const std::size_t r = options.rank;
  const std::size_t block = std::min(min_side, r + options.oversample);

  Rng rng(options.seed);
  Matrix v(g.n_right(), block);
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    for (Eigen::Index i = 0; i < v.rows(); ++i) v(i, j) = rng.Normal();
  }
  v = Orthonormalize(v);

  SvdFactors out;
  out.rank = r;
  Matrix u_r, v_r;
  Eigen::VectorXd s;
  for (std::size_t it = 1;
       it <= std::max<std::size_t>(1, options.max_iterations); ++it) {
    out.iterations = it;
    const Matrix w = Orthonormalize(a * v);
    v = Orthonormalize(at * w);
    // Rayleigh-Ritz on the current right subspace.
    const Matrix b = a * v;
    Eigen::JacobiSVD<Matrix> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
    s = svd.singularValues().head(r);
    u_r = svd.matrixU().leftCols(r);
    v_r = v * svd.matrixV().leftCols(r);
    const double top = s(0);
    if (top == 0.0) {
      out.residual = 0.0;
      out.converged = true;
      break;
    }
    const Matrix res = at * u_r - v_r * s.asDiagonal();
    out.residual = res.colwise().norm().maxCoeff() / top;
    if (out.residual < options.tol) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged) {
    throw NumericalError(
        "svd: no convergence after " + std::to_string(out.iterations) +
        " iterations (residual " + std::to_string(out.residual) + ")");
  }
  out.values.assign(s.data(), s.data() + r);
  out.factors =
      EmbeddingStore(GraphMode::kBipartite, g.n_left(), g.n_right(), r);
  for (std::size_t i = 0; i < g.n_left(); ++i) {
    auto row = out.factors.left(static_cast<VertexId>(i));
    for (std::size_t k = 0; k < r; ++k) {
      row[k] = u_r(i, k) * std::sqrt(s(k));
    }
  }
  for (std::size_t i = 0; i < g.n_right(); ++i) {
    auto row = out.factors.right(static_cast<VertexId>(i));
    for (std::size_t k = 0; k < r; ++k) {
      row[k] = v_r(i, k) * std::sqrt(s(k));
    }
  }
  return out;
}

}  // namespace lge
