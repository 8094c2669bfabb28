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

#include "lge/evaluation.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lge/error.h"
#include "lge/numeric.h"
#include "lge/random.h"

namespace lge {

double AveragePrecision(std::span<const ScoredLabel> predictions) {
  std::vector<std::size_t> order(predictions.size());
  std::iota(order.begin(), order.end(), 0);
  for (const ScoredLabel& p : predictions) {
    if (!std::isfinite(p.score)) {
      throw ConfigError("average precision: non-finite score");
    }
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) {
                     return predictions[x].score > predictions[y].score;
                   });
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (predictions[order[rank]].label > 0) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(rank + 1);
    }
  }
  if (hits == 0) {
    throw ConfigError("average precision is undefined without positives");
  }
  return sum / static_cast<double>(hits);
}

ApResult ShuffledAp(std::vector<ScoredLabel> preds,
                    std::uint64_t shuffle_seed) {
  ApResult result;
  result.seed = shuffle_seed;
  for (const ScoredLabel& p : preds)
    (p.label > 0 ? result.n_pos : result.n_neg)++;
  Rng rng(shuffle_seed);
  Shuffle(std::span<ScoredLabel>(preds), rng);
  result.value = AveragePrecision(preds);
  return result;
}

ApResult LinkPredictionAp(const EmbeddingStore& store,
                          const LabeledEdgeSet& eval_set,
                          std::uint64_t shuffle_seed) {
  std::vector<ScoredLabel> preds;
  preds.reserve(eval_set.size());
  for (const Sample& s : eval_set.samples) {
    preds.push_back({store.Dot(s.a, s.b), s.y});
  }
  return ShuffledAp(std::move(preds), shuffle_seed);
}

nlohmann::ordered_json ApToJson(const ApResult& result) {
  nlohmann::ordered_json j;
  j["metric"] = "average_precision";
  j["value"] = result.value;
  j["n_pos"] = result.n_pos;
  j["n_neg"] = result.n_neg;
  j["tie_rule"] = kApTieRule;
  j["convention"] = kApConvention;
  j["seed"] = result.seed;
  return j;
}

// ---------------------------------------------------------------------------

void LabelTask::Validate() const {
  if (num_classes < 1) throw ConfigError("label task needs >= 1 class");
  for (int c : labels) {
    if (c < 0 || c >= num_classes) {
      throw ConfigError("class id " + std::to_string(c) + " out of range");
    }
  }
  std::vector<bool> in_train(labels.size(), false);
  for (VertexId v : train) {
    if (v >= labels.size()) throw ConfigError("train vertex out of range");
    in_train[v] = true;
  }
  for (VertexId v : test) {
    if (v >= labels.size()) throw ConfigError("test vertex out of range");
    if (in_train[v]) throw ConfigError("train and test vertices overlap");
  }
}

LabelTask MakeLabelTask(std::vector<int> labels, int num_classes,
                        double train_fraction, std::uint64_t seed) {
  LabelTask task;
  task.num_classes = num_classes;
  std::vector<VertexId> vertices(labels.size());
  std::iota(vertices.begin(), vertices.end(), VertexId{0});
  Rng rng(seed);
  Shuffle(std::span<VertexId>(vertices), rng);
  const auto n_train = static_cast<std::size_t>(
      std::llround(train_fraction * static_cast<double>(vertices.size())));
  task.train.assign(vertices.begin(), vertices.begin() + n_train);
  task.test.assign(vertices.begin() + n_train, vertices.end());
  task.labels = std::move(labels);
  task.Validate();
  return task;
}

int LinearClassifier::Predict(std::span<const double> x) const {
  int best = 0;
  double best_score = -INFINITY;
  for (std::size_t c = 0; c < weights.size(); ++c) {
    const double s = Dot(x, std::span<const double>(weights[c]).first(dim)) +
                     weights[c][dim];
    if (s > best_score) {
      best_score = s;
      best = static_cast<int>(c);
    }
  }
  return best;
}

LinearClassifier TrainClassifier(const EmbeddingStore& store,
                                 const LabelTask& task, double reg, int iters) {
  task.Validate();
  if (task.train.empty()) throw ConfigError("classifier needs training data");
  const std::size_t dim = store.dim();
  const auto n = static_cast<double>(task.train.size());
  LinearClassifier clf;
  clf.dim = dim;
  clf.weights.assign(task.num_classes, std::vector<double>(dim + 1, 0.0));
  clf.absent.assign(task.num_classes, true);
  for (VertexId v : task.train) clf.absent[task.labels[v]] = false;

  // Full-batch gradient descent with step 1/L, where L bounds the curvature
  // of the mean logistic loss plus the ridge term.
  double max_sq = 0.0;
  for (VertexId v : task.train) {
    max_sq = std::max(max_sq, SquaredNorm(store.left(v)) + 1.0);
  }
  const double step = 1.0 / (0.25 * max_sq + reg);

  std::vector<double> grad(dim + 1);
  for (int c = 0; c < task.num_classes; ++c) {
    std::vector<double>& w = clf.weights[c];
    if (clf.absent[c]) {
      // Bias-only score: the smoothed prior of a class never seen in train.
      w[dim] = std::log(1.0 / (n + 2.0));
      continue;
    }
    for (int it = 0; it < iters; ++it) {
      std::fill(grad.begin(), grad.end(), 0.0);
      for (VertexId v : task.train) {
        const auto x = store.left(v);
        const double y = task.labels[v] == c ? 1.0 : -1.0;
        const double margin =
            y * (Dot(x, std::span<const double>(w).first(dim)) + w[dim]);
        const double coef = -y * Sigmoid(-margin) / n;
        Axpy(coef, x, std::span<double>(grad).first(dim));
        grad[dim] += coef;
      }
      for (std::size_t k = 0; k < dim; ++k) grad[k] += reg * w[k];
      for (std::size_t k = 0; k <= dim; ++k) w[k] -= step * grad[k];
    }
  }
  return clf;
}

std::vector<int> PredictVertices(const LinearClassifier& clf,
                                 const EmbeddingStore& store,
                                 std::span<const VertexId> vertices) {
  std::vector<int> out;
  out.reserve(vertices.size());
  for (VertexId v : vertices) out.push_back(clf.Predict(store.left(v)));
  return out;
}

double MacroF1(std::span<const int> predicted, std::span<const int> truth,
               int num_classes) {
  if (predicted.size() != truth.size()) {
    throw ConfigError("macro-F1: prediction/truth size mismatch");
  }
  if (truth.empty()) throw ConfigError("macro-F1 is undefined on an empty set");
  std::vector<double> tp(num_classes), fp(num_classes), fn(num_classes);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (predicted[i] == truth[i]) {
      tp[truth[i]] += 1;
    } else {
      fp[predicted[i]] += 1;
      fn[truth[i]] += 1;
    }
  }
  double sum = 0.0;
  for (int c = 0; c < num_classes; ++c) {
    const double denom = 2 * tp[c] + fp[c] + fn[c];
    if (denom > 0) sum += 2 * tp[c] / denom;
  }
  return sum / num_classes;
}

double EvaluateMacroF1(const EmbeddingStore& store, const LabelTask& task,
                       double reg, int iters) {
  const LinearClassifier clf = TrainClassifier(store, task, reg, iters);
  const std::vector<int> predicted = PredictVertices(clf, store, task.test);
  std::vector<int> truth;
  truth.reserve(task.test.size());
  for (VertexId v : task.test) truth.push_back(task.labels[v]);
  return MacroF1(predicted, truth, task.num_classes);
}

}  // namespace lge
