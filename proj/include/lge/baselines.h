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

// Reference link predictors that do not train embeddings.

#ifndef LGE_BASELINES_H_
#define LGE_BASELINES_H_

#include <cstdint>
#include <vector>

#include "lge/embeddings.h"
#include "lge/evaluation.h"
#include "lge/graph.h"

namespace lge {

// |N(a) ∩ N(b)|. Homogeneous graphs only.
std::size_t CommonNeighborScore(const Graph& g, VertexId a, VertexId b);

// Common-neighbor scores packaged for the AP evaluator.
ApResult CommonNeighborAp(const Graph& g, const LabeledEdgeSet& eval,
                          std::uint64_t shuffle_seed);

struct SvdOptions {
  std::size_t rank = 16;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  std::size_t max_iterations = 1000;
  // Extra block columns beyond `rank` to speed up convergence.
  std::size_t oversample = 8;
};

struct SvdFactors {
  std::size_t rank = 0;
  std::vector<double> values;  // non-increasing
  // Left rows hold u_i * sqrt(s), right rows v_i * sqrt(s), so that
  // factors.Dot(a, b) is the rank-r approximation of A(a, b).
  EmbeddingStore factors;
  double residual = 0.0;  // max_i |A^T u_i - s_i v_i| / s_1
  std::size_t iterations = 0;
  bool converged = false;
};

// Top singular triplets of the 0/1 adjacency matrix (symmetric for
// homogeneous graphs) by block power iteration with Rayleigh-Ritz.
SvdFactors TruncatedSvd(const Graph& g, const SvdOptions& options);

}  // namespace lge

#endif  // LGE_BASELINES_H_
