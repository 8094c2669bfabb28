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

// Dual coordinate descent for the hinge-loss embedding objective
//
//   L = l+ sum_{E+} h(x_u.x_v) + l- sum_{E-} h(-x_u.x_v) + l_r/2 sum |x_v|^2,
//   h(z) = max(1 - z, 0).
//
// Holding every other vector fixed, the terms of L that involve x_u form a
// soft-margin linear SVM with training points (x_v, y) and per-point box
// bound C = l_y / l_r. Each vertex keeps its own dual variables for that SVM
// and x_u is always the primal point w = sum alpha * y * x_v.

#ifndef LGE_DCD_H_
#define LGE_DCD_H_

#include <cstdint>
#include <span>
#include <vector>

#include "lge/embeddings.h"
#include "lge/graph.h"
#include "lge/incidence.h"
#include "lge/random.h"
#include "lge/trace.h"

namespace lge {

struct DcdConfig {
  double lambda_pos = 1.0;
  double lambda_neg = 0.03;
  double lambda_reg = 1.0;  // must be > 0
  int sweeps = 20;
  std::uint64_t order_seed = 0;
  // Visit a vertex's samples in a fresh random order on every update.
  bool inner_shuffle = true;
  double kkt_tol = 1e-3;
  // Re-solve a vertex back to back while its residual exceeds kkt_tol, up to
  // this many passes per visit. 1 is the plain single-pass update.
  int max_inner_passes = 1;
  // >1 partitions each sweep's vertices across threads (not reproducible).
  std::size_t threads = 1;

  void Validate() const;
  double upper(int y) const {
    return (y > 0 ? lambda_pos : lambda_neg) / lambda_reg;
  }
};

double HingeLoss(const EmbeddingStore& store, const LabeledEdgeSet& data,
                 const DcdConfig& config);

// ---------------------------------------------------------------------------
// A single vertex subproblem, detached from the graph:
//
//   min_w  sum_i C_i max(1 - y_i w.x_i, 0) + 1/2 |w|^2
//   dual:  max_{0 <= a_i <= C_i}  sum_i a_i - 1/2 |sum_i a_i y_i x_i|^2

struct DualTerm {
  std::span<const double> x;
  int y = +1;
  double upper = 0.0;
  double* alpha = nullptr;
};

struct SolveStats {
  std::size_t updates = 0;       // coordinates with a nonzero projected grad
  std::size_t skipped_zero = 0;  // terms with x_i = 0
};

// One pass of the inner loop in `order` (all terms when empty):
//   w <- sum a y x;  for each i: G = y w.x_i - 1, projected gradient PG,
//   a_i <- clip(a_i - G / |x_i|^2, 0, C_i), w += (a_i - old) y x_i.
// Writes the final w to `w_out`.
SolveStats SolveSubproblem(std::span<const DualTerm> terms,
                           std::span<const std::size_t> order,
                           std::span<double> w_out);

// Max over terms of the KKT violation at `w`: for a = 0, max(0, -G); for
// a = C, max(0, G); otherwise |G|. Terms with x_i = 0 are ignored.
double SubproblemKktResidual(std::span<const DualTerm> terms,
                             std::span<const double> w);
double SubproblemPrimal(std::span<const DualTerm> terms,
                        std::span<const double> w);
double SubproblemDual(std::span<const DualTerm> terms);

// ---------------------------------------------------------------------------
// Graph-level state.

// Two duals per sample: slot 0 belongs to the subproblem centered at
// sample.a, slot 1 to the one centered at sample.b.
class DualState {
 public:
  explicit DualState(std::size_t num_samples) : alpha_(2 * num_samples, 0.0) {}
  double& at(std::size_t sample, int slot) { return alpha_[2 * sample + slot]; }
  double at(std::size_t sample, int slot) const {
    return alpha_[2 * sample + slot];
  }
  std::span<const double> values() const { return alpha_; }

 private:
  std::vector<double> alpha_;
};

// Everything solve_vertex needs besides the embeddings: the training set,
// its incidence index and the duals.
struct DcdProblem {
  DcdProblem(const LabeledEdgeSet& train, const EmbeddingStore& store);

  const LabeledEdgeSet* train;
  Incidence incidence;
  DualState duals;
};

// Updates x_u of (side, u) by one DCD pass over its incident samples, reading
// neighbor vectors at their current values. `rng` drives the inner shuffle.
SolveStats SolveVertex(Side side, VertexId u, EmbeddingStore& store,
                       DcdProblem& problem, const DcdConfig& config, Rng* rng);

double VertexKktResidual(Side side, VertexId u, const EmbeddingStore& store,
                         const DcdProblem& problem, const DcdConfig& config);

// |x_u - sum alpha y x_v|_inf with the current vectors.
double PrimalDualGap(Side side, VertexId u, const EmbeddingStore& store,
                     const DcdProblem& problem);

// True when every dual lies in [0, l_y / l_r].
bool DualsFeasible(const DcdProblem& problem, const DcdConfig& config);

struct DcdDiagnostics {
  double mean_kkt = 0.0;
  double max_kkt = 0.0;
  // Largest primal-dual mismatch observed right after any solve in the last
  // sweep.
  double max_primal_dual_gap = 0.0;
  std::size_t skipped_zero = 0;
  bool duals_feasible = true;
};

DcdDiagnostics ComputeDiagnostics(const EmbeddingStore& store,
                                  const DcdProblem& problem,
                                  const DcdConfig& config);

struct DcdResult {
  TrainTrace trace;
  DcdDiagnostics diagnostics;
};

// T sweeps over all vertices (both partitions when bipartite) in a seeded
// order, applying SolveVertex to each. The hook runs after every sweep.
DcdResult TrainDcd(const LabeledEdgeSet& train, EmbeddingStore& store,
                   const DcdConfig& config, const EpochHook& hook = {});

}  // namespace lge

#endif  // LGE_DCD_H_
