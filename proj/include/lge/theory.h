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

// Generalization-bound terms for norm-constrained embeddings, the random
// sign-matrix spectral norm that drives them, and an explicit construction
// that fits arbitrary edge labels on a d-regular graph in d dimensions.

#ifndef LGE_THEORY_H_
#define LGE_THEORY_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "lge/embeddings.h"
#include "lge/graph.h"

namespace lge {

// Nonzero pattern of the sign matrix: one position per distinct sample pair.
// Homogeneous samples occupy (min, max) only, unless `symmetric`, in which
// case the mirrored position carries the same sign.
struct SignPattern {
  std::size_t rows = 0;
  std::size_t cols = 0;
  bool symmetric = false;
  std::vector<Edge> positions;  // sorted, distinct

  static SignPattern FromSamples(const LabeledEdgeSet& data, std::size_t rows,
                                 std::size_t cols, bool symmetric = false);
};

// Dense row-major copy of the signed matrix, for oracles and small cases.
std::vector<double> DenseSignMatrix(const SignPattern& pattern,
                                    std::span<const double> signs);

// One Rademacher draw per position.
std::vector<double> DrawSigns(std::size_t count, std::uint64_t seed);

struct PowerResult {
  double value = 0.0;  // spectral norm estimate
  std::size_t iterations = 0;
  bool converged = false;
};

// Power iteration on A^T A from a random unit start vector; stops when
// successive eigenvalue estimates differ by less than tol * current, or
// after max_iterations (0 means 10 * max(rows, cols)).
PowerResult SpectralNormPower(const SignPattern& pattern,
                              std::span<const double> signs, double tol,
                              std::uint64_t start_seed,
                              std::size_t max_iterations = 0);

struct SpectralOptions {
  std::size_t n_draws = 20;
  std::uint64_t seed = 0;
  double tol = 1e-12;
  bool symmetric = false;
  // Fresh start vectors tried after a non-converged run. Retry k runs with
  // 4^k times the default iteration cap, since slow runs come from nearly
  // tied top singular values rather than from a bad start.
  std::size_t max_retries = 3;
};

struct SpectralEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_draws = 0;
  std::vector<double> draws;
  std::size_t retries = 0;
  std::size_t unconverged = 0;  // draws still unconverged after retries
};

// Seeds for draw i: signs from DeriveSeed(seed, {i, 0}), start vector for
// attempt k from DeriveSeed(seed, {i, k + 1}).
std::uint64_t SignSeed(std::uint64_t seed, std::size_t draw);
std::uint64_t StartSeed(std::uint64_t seed, std::size_t draw,
                        std::size_t attempt);

SpectralEstimate SpectralNormMc(const LabeledEdgeSet& data, std::size_t rows,
                                std::size_t cols,
                                const SpectralOptions& options);

// sqrt(8 m ln n / n).
double ErdosRenyiEstimate(std::size_t n, double m);
// sqrt(m ln n / n), the same estimate without its constant.
double ErdosRenyiScale(std::size_t n, double m);

// min(-log sigmoid(margin), bound).
double ClippedLogisticLoss(double margin, double bound);
double MeanClippedLoss(const EmbeddingStore& store, const LabeledEdgeSet& data,
                       double bound);

struct BoundOptions {
  double loss_bound = 4.0;
  double delta = 0.05;
  SpectralOptions spectral;
};

struct BoundReport {
  std::size_t m_total = 0;  // training samples m + m'
  double c_u = 0.0;
  double c_v = 0.0;
  double loss_bound = 0.0;
  double delta = 0.0;
  SpectralEstimate spectral;
  double rademacher_term = 0.0;
  double confidence_term = 0.0;
  double rhs_gap = 0.0;
  double train_loss = 0.0;
  double test_loss = 0.0;
  double observed_gap = 0.0;
  bool symmetric = false;
  double tol = 0.0;
  std::uint64_t seed = 0;
};

double ConfidenceTerm(double loss_bound, double delta, std::size_t m_total);

// C_U and C_V are the measured total squared norms of each side; for a
// shared store both equal the total over all vectors.
BoundReport ComputeBoundReport(const EmbeddingStore& store,
                               const LabeledEdgeSet& train,
                               const LabeledEdgeSet& test,
                               const BoundOptions& options);

nlohmann::ordered_json ToJson(const BoundReport& report);

// ---------------------------------------------------------------------------
// Fitting random labels on a d-regular graph.

std::vector<int> RandomEdgeLabels(std::size_t m, std::uint64_t seed);

struct OverfitOptions {
  double epsilon = 0.5;
  std::uint64_t seed = 0;
  std::size_t max_sweeps = 10;
  // Perturbation radii 0.1 * 2^-k for k < max_perturbations.
  std::size_t max_perturbations = 60;
  // Smallest singular value relative to the largest below which a set of d
  // vectors counts as linearly dependent.
  double rank_tol = 1e-9;
};

struct OverfitCertificate {
  std::string graph_id;
  std::size_t d = 0;
  std::size_t n = 0;
  std::size_t m = 0;
  std::uint64_t label_seed = 0;
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  std::vector<double> margins;  // y_i x_a . x_b, in graph edge order
  double min_margin = 0.0;
  std::size_t sweeps = 0;
  std::size_t iterations = 0;  // vertex solves including perturbation tries
  bool success = false;        // min_margin > 1
};

struct OverfitResult {
  OverfitCertificate certificate;
  EmbeddingStore embedding;
};

// `labels` follows g.edges() order. Throws ConfigError if g is not regular.
OverfitResult ConstructOverfit(const Graph& g, std::span<const int> labels,
                               std::uint64_t label_seed,
                               const OverfitOptions& options);

// Recomputes every margin from the stored vectors; true when they match the
// certificate within `tol` and all exceed 1.
bool VerifyCertificate(const Graph& g, std::span<const int> labels,
                       const EmbeddingStore& embedding,
                       const OverfitCertificate& certificate,
                       double tol = 1e-9);

nlohmann::ordered_json ToJson(const OverfitCertificate& certificate);

}  // namespace lge

#endif  // LGE_THEORY_H_
