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

// Link-prediction average precision and node-label macro-F1.

#ifndef LGE_EVALUATION_H_
#define LGE_EVALUATION_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "lge/embeddings.h"
#include "lge/graph.h"

namespace lge {

// Ties in score are broken by position in the input sequence (earlier
// ranks higher). Callers that want a null-distribution AP for tied scores
// shuffle the input first, as LinkPredictionAp does.
inline constexpr std::string_view kApTieRule = "stable-input-index";
inline constexpr std::string_view kApConvention =
    "discrete: mean precision at positive ranks";

struct ScoredLabel {
  double score = 0.0;
  int label = +1;  // +1 relevant, -1 not
};

// Mean over positives, in rank order, of (#positives at rank <= k) / k.
// Throws ConfigError when there is no positive or a score is not finite.
double AveragePrecision(std::span<const ScoredLabel> predictions);

struct ApResult {
  double value = 0.0;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  std::uint64_t seed = 0;
};

// Scores each pair by left[a] . right[b] after shuffling `eval_set` with
// `shuffle_seed`, then returns AveragePrecision.
// Shuffles `preds` by seed, then scores them.
ApResult ShuffledAp(std::vector<ScoredLabel> preds, std::uint64_t shuffle_seed);

ApResult LinkPredictionAp(const EmbeddingStore& store,
                          const LabeledEdgeSet& eval_set,
                          std::uint64_t shuffle_seed);

// Metrics JSON: {metric, value, n_pos, n_neg, tie_rule, seed}.
nlohmann::ordered_json ApToJson(const ApResult& result);

// ---------------------------------------------------------------------------
// Node classification.

struct LabelTask {
  std::vector<int> labels;  // per vertex, in [0, num_classes)
  int num_classes = 0;
  std::vector<VertexId> train;
  std::vector<VertexId> test;

  void Validate() const;
};

// Random vertex split with `train_fraction` of the vertices for training.
LabelTask MakeLabelTask(std::vector<int> labels, int num_classes,
                        double train_fraction, std::uint64_t seed);

// One-vs-rest l2-regularized logistic regression over [x_v; 1].
struct LinearClassifier {
  std::size_t dim = 0;
  std::vector<std::vector<double>> weights;  // num_classes x (dim + 1)
  std::vector<bool> absent;                  // class missing from train

  int Predict(std::span<const double> x) const;
};

LinearClassifier TrainClassifier(const EmbeddingStore& store,
                                 const LabelTask& task, double reg = 1e-3,
                                 int iters = 300);

std::vector<int> PredictVertices(const LinearClassifier& clf,
                                 const EmbeddingStore& store,
                                 std::span<const VertexId> vertices);

// Unweighted mean over classes of per-class F1 (0 when undefined).
double MacroF1(std::span<const int> predicted, std::span<const int> truth,
               int num_classes);

// Trains on task.train and reports macro-F1 on task.test.
double EvaluateMacroF1(const EmbeddingStore& store, const LabelTask& task,
                       double reg = 1e-3, int iters = 300);

}  // namespace lge

#endif  // LGE_EVALUATION_H_
