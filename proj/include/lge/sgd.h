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

// SGD on the regularized logistic negative-sampling objective
//
//   L = -l+ sum_{E+} log s(x_u.x_v) - l- sum_{E-} log s(-x_u.x_v)
//       + l_r sum_v |x_v|^2
//
// with step size (t + c)^-1/2, t counting epochs from 1 by default.

#ifndef LGE_SGD_H_
#define LGE_SGD_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lge/embeddings.h"
#include "lge/graph.h"
#include "lge/incidence.h"
#include "lge/trace.h"

namespace lge {

// What the step counter t in (t + c)^-1/2 counts.
enum class StepClock {
  kUpdate,  // every sample update, from 1
  kEpoch,   // every epoch, from 1; constant rate within an epoch
};

struct SgdConfig {
  double lambda_pos = 1.0;
  double lambda_neg = 0.03;
  double lambda_reg = 0.0;
  // When set, a negative sample (a, b) is weighted kappa * |N+(a)| / |N-(a)|
  // instead of lambda_neg.
  std::optional<double> kappa;
  double lr_c = 1.0;
  StepClock clock = StepClock::kEpoch;
  int epochs = 50;
  std::uint64_t order_seed = 0;
  // Caps the l2 norm of each per-sample, per-endpoint gradient.
  std::optional<double> clip;
  // Redraw the negatives of the training set at the start of every epoch.
  bool resample_negatives = false;
  std::size_t negative_ratio = 4;
  std::uint64_t resample_seed = 0;
  // >1 enables lock-free updates from several threads (not reproducible).
  std::size_t threads = 1;

  void Validate() const;
};

// Loss weight of every sample in `data` under `config`.
std::vector<double> SampleWeights(const LabeledEdgeSet& data,
                                  const Incidence& incidence,
                                  const SgdConfig& config);

// Exact objective value. The regularizer sums over every row of `store`.
double SgdLoss(const EmbeddingStore& store, const LabeledEdgeSet& data,
               const SgdConfig& config);

// dL/dx_u restricted to the terms containing u, with flat lambda weights:
//   -l+ sum_{N+} s(-x_u.x_v) x_v + l- sum_{N-} s(x_u.x_v) x_v + 2 l_r x_u.
// The neighbors live on the side opposite to `side`.
std::vector<double> VertexGradient(const EmbeddingStore& store, Side side,
                                   VertexId u,
                                   std::span<const VertexId> pos_neighbors,
                                   std::span<const VertexId> neg_neighbors,
                                   const SgdConfig& config);

// Mean over every row of the l2 norm of its full gradient.
double AverageGradientNorm(const EmbeddingStore& store,
                           const LabeledEdgeSet& data, const SgdConfig& config);

// Runs config.epochs passes over `train` in a seeded shuffled order. Each
// sample (u, v, y) first moves x_u, then x_v using the updated x_u. The
// regularizer pull on vertex w is split evenly across its training samples.
// The hook (if any) runs after every epoch.
//
// `graph` is only consulted when negatives are resampled per epoch.
TrainTrace TrainSgd(const Graph& graph, const LabeledEdgeSet& train,
                    EmbeddingStore& store, const SgdConfig& config,
                    const EpochHook& hook = {});

}  // namespace lge

#endif  // LGE_SGD_H_
