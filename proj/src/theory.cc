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

#include "lge/theory.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "lge/error.h"
#include "lge/hash.h"
#include "lge/numeric.h"
#include "lge/random.h"

namespace lge {

SignPattern SignPattern::FromSamples(const LabeledEdgeSet& data,
                                     std::size_t rows, std::size_t cols,
                                     bool symmetric) {
  SignPattern p;
  p.rows = rows;
  p.cols = cols;
  const bool homogeneous = data.mode == GraphMode::kHomogeneous;
  if (homogeneous && rows != cols) {
    throw ConfigError("sign pattern: homogeneous data needs a square matrix");
  }
  p.symmetric = homogeneous && symmetric;
  p.positions.reserve(data.size());
  for (const Sample& s : data.samples) {
    Edge e{s.a, s.b};
    if (homogeneous && e.a > e.b) std::swap(e.a, e.b);
    if (e.a >= rows || e.b >= cols) {
      throw ConfigError("sign pattern: sample id outside the matrix");
    }
    p.positions.push_back(e);
  }
  std::sort(p.positions.begin(), p.positions.end());
  p.positions.erase(std::unique(p.positions.begin(), p.positions.end()),
                    p.positions.end());
  return p;
}

std::vector<double> DenseSignMatrix(const SignPattern& pattern,
                                    std::span<const double> signs) {
  std::vector<double> a(pattern.rows * pattern.cols, 0.0);
  for (std::size_t i = 0; i < pattern.positions.size(); ++i) {
    const Edge e = pattern.positions[i];
    a[e.a * pattern.cols + e.b] = signs[i];
    if (pattern.symmetric) a[e.b * pattern.cols + e.a] = signs[i];
  }
  return a;
}

std::vector<double> DrawSigns(std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> signs(count);
  for (double& s : signs) s = rng.Rademacher();
  return signs;
}

PowerResult SpectralNormPower(const SignPattern& pattern,
                              std::span<const double> signs, double tol,
                              std::uint64_t start_seed,
                              std::size_t max_iterations) {
  if (signs.size() != pattern.positions.size()) {
    throw ConfigError("power iteration: one sign per position required");
  }
  if (max_iterations == 0) {
    max_iterations = 10 * std::max(pattern.rows, pattern.cols);
  }
  struct Entry {
    VertexId row, col;
    double value;
  };
  std::vector<Entry> entries;
  entries.reserve(signs.size() * (pattern.symmetric ? 2 : 1));
  for (std::size_t i = 0; i < signs.size(); ++i) {
    const Edge e = pattern.positions[i];
    entries.push_back({e.a, e.b, signs[i]});
    if (pattern.symmetric) entries.push_back({e.b, e.a, signs[i]});
  }

  PowerResult result;
  if (entries.empty()) {
    result.converged = true;
    return result;
  }
  Rng rng(start_seed);
  std::vector<double> x(pattern.cols), y(pattern.rows), z(pattern.cols);
  for (double& v : x) v = rng.Normal();
  double norm = std::sqrt(SquaredNorm(x));
  for (double& v : x) v /= norm;

  double prev = -1.0;
  for (std::size_t it = 1; it <= max_iterations; ++it) {
    std::fill(y.begin(), y.end(), 0.0);
    for (const Entry& e : entries) y[e.row] += e.value * x[e.col];
    std::fill(z.begin(), z.end(), 0.0);
    for (const Entry& e : entries) z[e.col] += e.value * y[e.row];
    const double lambda = SquaredNorm(y);  // x^T A^T A x with |x| = 1
    result.iterations = it;
    result.value = std::sqrt(lambda);
    norm = std::sqrt(SquaredNorm(z));
    if (norm == 0.0) {
      // Start vector orthogonal to the row space; only possible by accident.
      for (double& v : x) v = rng.Normal();
      norm = std::sqrt(SquaredNorm(x));
      for (double& v : x) v /= norm;
      prev = -1.0;
      continue;
    }
    if (prev >= 0.0 && std::abs(lambda - prev) < tol * lambda) {
      result.converged = true;
      return result;
    }
    prev = lambda;
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = z[k] / norm;
  }
  return result;
}

std::uint64_t SignSeed(std::uint64_t seed, std::size_t draw) {
  return DeriveSeed(seed, {static_cast<std::uint64_t>(draw), 0});
}

std::uint64_t StartSeed(std::uint64_t seed, std::size_t draw,
                        std::size_t attempt) {
  return DeriveSeed(seed, {static_cast<std::uint64_t>(draw),
                           static_cast<std::uint64_t>(attempt) + 1});
}

SpectralEstimate SpectralNormMc(const LabeledEdgeSet& data, std::size_t rows,
                                std::size_t cols,
                                const SpectralOptions& options) {
  if (options.n_draws < 1) throw ConfigError("spectral: n_draws must be >= 1");
  if (data.empty()) throw ConfigError("spectral: empty sample set");
  if (!(options.tol > 0.0)) throw ConfigError("spectral: tol must be > 0");
  const SignPattern pattern =
      SignPattern::FromSamples(data, rows, cols, options.symmetric);

  SpectralEstimate est;
  est.n_draws = options.n_draws;
  for (std::size_t i = 0; i < options.n_draws; ++i) {
    const auto signs =
        DrawSigns(pattern.positions.size(), SignSeed(options.seed, i));
    PowerResult r;
    std::size_t cap = 10 * std::max(rows, cols);
    for (std::size_t attempt = 0; attempt <= options.max_retries; ++attempt) {
      r = SpectralNormPower(pattern, signs, options.tol,
                            StartSeed(options.seed, i, attempt), cap);
      cap *= 4;
      if (r.converged) break;
      if (attempt < options.max_retries) ++est.retries;
    }
    if (!r.converged) ++est.unconverged;
    est.draws.push_back(r.value);
  }
  const double n = static_cast<double>(est.draws.size());
  est.mean = std::accumulate(est.draws.begin(), est.draws.end(), 0.0) / n;
  if (est.draws.size() > 1) {
    double ss = 0.0;
    for (double v : est.draws) ss += (v - est.mean) * (v - est.mean);
    est.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return est;
}

double ErdosRenyiEstimate(std::size_t n, double m) {
  return std::sqrt(8.0) * ErdosRenyiScale(n, m);
}

double ErdosRenyiScale(std::size_t n, double m) {
  if (n < 2) throw ConfigError("erdos-renyi estimate: n must be >= 2");
  if (m < 0.0) throw ConfigError("erdos-renyi estimate: m must be >= 0");
  const double nn = static_cast<double>(n);
  return std::sqrt(m * std::log(nn) / nn);
}

double ClippedLogisticLoss(double margin, double bound) {
  return std::min(-LogSigmoid(margin), bound);
}

double MeanClippedLoss(const EmbeddingStore& store, const LabeledEdgeSet& data,
                       double bound) {
  if (data.empty()) return 0.0;
  double sum = 0.0;
  for (const Sample& s : data.samples) {
    sum += ClippedLogisticLoss(s.y * store.Dot(s.a, s.b), bound);
  }
  return sum / static_cast<double>(data.size());
}

double ConfidenceTerm(double loss_bound, double delta, std::size_t m_total) {
  return 4.0 * loss_bound *
         std::sqrt(2.0 * std::log(4.0 / delta) / static_cast<double>(m_total));
}

BoundReport ComputeBoundReport(const EmbeddingStore& store,
                               const LabeledEdgeSet& train,
                               const LabeledEdgeSet& test,
                               const BoundOptions& options) {
  if (train.empty()) throw ConfigError("bound report: empty training set");
  if (!(options.loss_bound > 0.0)) {
    throw ConfigError("bound report: loss bound must be > 0");
  }
  if (!(options.delta > 0.0 && options.delta < 1.0)) {
    throw ConfigError("bound report: delta must be in (0, 1)");
  }
  BoundReport r;
  r.m_total = train.size();
  r.loss_bound = options.loss_bound;
  r.delta = options.delta;
  r.symmetric = options.spectral.symmetric;
  r.tol = options.spectral.tol;
  r.seed = options.spectral.seed;

  const NormReport norms = ComputeNormReport(store);
  if (store.shared()) {
    r.c_u = r.c_v = norms.combined.total_sq_norm;
  } else {
    r.c_v = norms.left.total_sq_norm;
    r.c_u = norms.right.total_sq_norm;
  }
  r.spectral =
      SpectralNormMc(train, store.n_left(), store.n_right(), options.spectral);
  const double m = static_cast<double>(r.m_total);
  r.rademacher_term = 2.0 / m * r.spectral.mean * std::sqrt(r.c_u * r.c_v);
  r.confidence_term = ConfidenceTerm(r.loss_bound, r.delta, r.m_total);
  r.rhs_gap = r.rademacher_term + r.confidence_term;
  r.train_loss = MeanClippedLoss(store, train, r.loss_bound);
  r.test_loss = MeanClippedLoss(store, test, r.loss_bound);
  r.observed_gap = r.test_loss - r.train_loss;
  return r;
}

nlohmann::ordered_json ToJson(const BoundReport& r) {
  nlohmann::ordered_json j;
  j["m_plus_mprime"] = r.m_total;
  j["C_U"] = r.c_u;
  j["C_V"] = r.c_v;
  j["B"] = r.loss_bound;
  j["loss"] = "clipped_logistic";
  j["delta"] = r.delta;
  j["spectral_mc"] = {
      {"mean", r.spectral.mean},
      {"std_error", r.spectral.std_error},
      {"n_draws", r.spectral.n_draws},
      {"retries", r.spectral.retries},
      {"unconverged", r.spectral.unconverged},
      {"tol", r.tol},
      {"seed", r.seed},
      {"positions", r.symmetric ? "symmetric" : "one-per-sample"}};
  j["rademacher_term"] = r.rademacher_term;
  j["confidence_term"] = r.confidence_term;
  j["rhs_gap"] = r.rhs_gap;
  j["train_loss"] = r.train_loss;
  j["test_loss"] = r.test_loss;
  j["observed_gap"] = r.observed_gap;
  return j;
}

// ---------------------------------------------------------------------------

std::vector<int> RandomEdgeLabels(std::size_t m, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<int> labels(m);
  for (int& y : labels) y = rng.Bernoulli(0.5) ? +1 : -1;
  return labels;
}

namespace {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

std::size_t EdgeIndex(const Graph& g, VertexId u, VertexId v) {
  const Edge key{std::min(u, v), std::max(u, v)};
  const auto edges = g.edges();
  const auto it = std::lower_bound(edges.begin(), edges.end(), key);
  return static_cast<std::size_t>(it - edges.begin());
}

// Rows are the vectors of v's neighbors.
Matrix NeighborMatrix(const Graph& g, const EmbeddingStore& x, VertexId v) {
  const auto nbrs = g.neighbors(v);
  Matrix m(nbrs.size(), x.dim());
  for (std::size_t i = 0; i < nbrs.size(); ++i) {
    const auto row = x.left(nbrs[i]);
    for (std::size_t k = 0; k < x.dim(); ++k) m(i, k) = row[k];
  }
  return m;
}

bool WellConditioned(const Matrix& m, double rank_tol) {
  const Vector s = Eigen::JacobiSVD<Matrix>(m).singularValues();
  return s.size() > 0 && s(s.size() - 1) > rank_tol * s(0);
}

}  // namespace

OverfitResult ConstructOverfit(const Graph& g, std::span<const int> labels,
                               std::uint64_t label_seed,
                               const OverfitOptions& options) {
  if (!g.homogeneous()) throw ConfigError("overfit: graph must be homogeneous");
  const std::size_t n = g.n_left();
  if (n == 0) throw ConfigError("overfit: empty graph");
  const std::size_t d = g.degree(0);
  for (VertexId v = 0; v < n; ++v) {
    if (g.degree(v) != d) {
      throw ConfigError("overfit: graph is not regular (vertex " +
                        std::to_string(v) + " has degree " +
                        std::to_string(g.degree(v)) + ", expected " +
                        std::to_string(d) + ")");
    }
  }
  if (d == 0) throw ConfigError("overfit: degree must be >= 1");
  if (labels.size() != g.num_edges()) {
    throw ConfigError("overfit: need one label per edge");
  }
  if (!(options.epsilon > 0.0))
    throw ConfigError("overfit: epsilon must be > 0");

  OverfitResult out;
  OverfitCertificate& cert = out.certificate;
  cert.d = d;
  cert.n = n;
  cert.m = g.num_edges();
  cert.label_seed = label_seed;
  cert.seed = options.seed;
  cert.epsilon = options.epsilon;
  Fnv1a h;
  for (const Edge& e : g.edges()) {
    h.U64(e.a);
    h.U64(e.b);
  }
  cert.graph_id = "regular-n" + std::to_string(n) + "-d" + std::to_string(d) +
                  "-" + h.hex();

  EmbeddingStore& x = out.embedding;
  x = InitUniform(GraphMode::kHomogeneous, n, n, d, -1.0, 1.0,
                  DeriveSeed(options.seed, {0}));
  Rng rng(DeriveSeed(options.seed, {1}));

  auto margin_of = [&](std::size_t i) {
    const Edge e = g.edges()[i];
    return labels[i] * x.Dot(e.a, e.b);
  };

  for (std::size_t sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    cert.sweeps = sweep;
    for (VertexId v = 0; v < n; ++v) {
      const auto nbrs = g.neighbors(v);
      const Matrix m = NeighborMatrix(g, x, v);
      Vector rhs(d);
      for (std::size_t i = 0; i < d; ++i) {
        rhs(i) = (1.0 + options.epsilon) * labels[EdgeIndex(g, v, nbrs[i])];
      }
      ++cert.iterations;
      if (!WellConditioned(m, options.rank_tol)) continue;  // next sweep
      const Vector b = m.fullPivLu().solve(rhs);

      // Shrink the perturbation until the point keeps every margin above 1 and
      // leaves each neighbor's own system solvable.
      auto row = x.left(v);
      bool placed = false;
      for (std::size_t k = 0; k < options.max_perturbations && !placed; ++k) {
        ++cert.iterations;
        const double radius = 0.1 * std::ldexp(1.0, -static_cast<int>(k));
        Vector dir(d);
        for (std::size_t i = 0; i < d; ++i) dir(i) = rng.Normal();
        const Vector cand = b + radius * rng.Uniform01() * dir.normalized();
        for (std::size_t i = 0; i < d; ++i) row[i] = cand(i);
        bool ok = true;
        for (std::size_t i = 0; i < d && ok; ++i) {
          const double y = rhs(i) > 0.0 ? 1.0 : -1.0;
          ok = y * m.row(i).dot(cand) > 1.0;
        }
        for (std::size_t i = 0; i < d && ok; ++i) {
          ok = WellConditioned(NeighborMatrix(g, x, nbrs[i]), options.rank_tol);
        }
        placed = ok;
      }
      if (!placed) {
        for (std::size_t i = 0; i < d; ++i) row[i] = b(i);
      }
    }
    cert.margins.resize(cert.m);
    for (std::size_t i = 0; i < cert.m; ++i) cert.margins[i] = margin_of(i);
    cert.min_margin =
        *std::min_element(cert.margins.begin(), cert.margins.end());
    cert.success = cert.min_margin > 1.0;
    if (cert.success) break;
  }
  return out;
}

bool VerifyCertificate(const Graph& g, std::span<const int> labels,
                       const EmbeddingStore& embedding,
                       const OverfitCertificate& certificate, double tol) {
  const auto edges = g.edges();
  if (edges.size() != certificate.margins.size() ||
      labels.size() != edges.size() || embedding.dim() != certificate.d) {
    return false;
  }
  const auto data = embedding.left_data();
  const std::size_t d = embedding.dim();
  double lowest = INFINITY;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    double dot = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      dot += data[edges[i].a * d + k] * data[edges[i].b * d + k];
    }
    const double margin = labels[i] * dot;
    if (!(margin > 1.0)) return false;
    if (std::abs(margin - certificate.margins[i]) >
        tol * std::max(1.0, std::abs(margin))) {
      return false;
    }
    lowest = std::min(lowest, margin);
  }
  return std::abs(lowest - certificate.min_margin) <=
         tol * std::max(1.0, lowest);
}

nlohmann::ordered_json ToJson(const OverfitCertificate& c) {
  nlohmann::ordered_json j;
  j["graph_id"] = c.graph_id;
  j["d"] = c.d;
  j["n"] = c.n;
  j["m"] = c.m;
  j["label_seed"] = c.label_seed;
  j["seed"] = c.seed;
  j["epsilon"] = c.epsilon;
  j["min_margin"] = c.min_margin;
  j["success"] = c.success;
  j["sweeps"] = c.sweeps;
  j["iterations"] = c.iterations;
  j["margins"] = c.margins;
  return j;
}

}  // namespace lge
