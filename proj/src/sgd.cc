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

#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>
#include <thread>

#include "lge/error.h"
#include "lge/numeric.h"
#include "lge/random.h"
#include "relaxed_access.h"

namespace lge {

void SgdConfig::Validate() const {
  if (!(lambda_pos > 0.0)) throw ConfigError("sgd: lambda_pos must be > 0");
  if (!(lambda_neg > 0.0)) throw ConfigError("sgd: lambda_neg must be > 0");
  if (!(lambda_reg >= 0.0)) throw ConfigError("sgd: lambda_reg must be >= 0");
  if (!(lr_c > 0.0)) throw ConfigError("sgd: lr_c must be > 0");
  if (epochs < 0) throw ConfigError("sgd: epochs must be >= 0");
  if (kappa && !(*kappa > 0.0)) throw ConfigError("sgd: kappa must be > 0");
  if (clip && !(*clip > 0.0)) throw ConfigError("sgd: clip must be > 0");
  if (threads < 1) throw ConfigError("sgd: threads must be >= 1");
}

std::vector<double> SampleWeights(const LabeledEdgeSet& data,
                                  const Incidence& incidence,
                                  const SgdConfig& config) {
  std::vector<double> weights(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Sample& s = data.samples[i];
    if (s.y > 0) {
      weights[i] = config.lambda_pos;
    } else if (!config.kappa) {
      weights[i] = config.lambda_neg;
    } else {
      std::size_t pos = 0, neg = 0;
      for (const auto& e : incidence.of(Side::kLeft, s.a)) {
        (data.samples[e.sample].y > 0 ? pos : neg)++;
      }
      weights[i] =
          *config.kappa * static_cast<double>(pos) / static_cast<double>(neg);
    }
  }
  return weights;
}

namespace {

double RegularizerValue(const EmbeddingStore& store, double lambda_reg) {
  if (lambda_reg == 0.0) return 0.0;
  double sq = SquaredNorm(store.left_data());
  if (!store.shared()) sq += SquaredNorm(store.right_data());
  return lambda_reg * sq;
}

double WeightedLoss(const EmbeddingStore& store, const LabeledEdgeSet& data,
                    std::span<const double> weights, double lambda_reg) {
  double loss = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Sample& s = data.samples[i];
    loss -= weights[i] * LogSigmoid(s.y * store.Dot(s.a, s.b));
  }
  return loss + RegularizerValue(store, lambda_reg);
}

// Accumulates every row's full gradient into `left_grad`/`right_grad`.
void FullGradient(const EmbeddingStore& store, const LabeledEdgeSet& data,
                  std::span<const double> weights, double lambda_reg,
                  std::vector<double>& left_grad,
                  std::vector<double>& right_grad) {
  const std::size_t dim = store.dim();
  left_grad.assign(store.left_data().size(), 0.0);
  right_grad.assign(store.shared() ? 0 : store.right_data().size(), 0.0);
  std::vector<double>& rg = store.shared() ? left_grad : right_grad;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Sample& s = data.samples[i];
    const auto xa = store.left(s.a);
    const auto xb = store.right(s.b);
    const double coef = -weights[i] * s.y * Sigmoid(-s.y * Dot(xa, xb));
    Axpy(coef, xb, std::span<double>(left_grad).subspan(s.a * dim, dim));
    Axpy(coef, xa, std::span<double>(rg).subspan(s.b * dim, dim));
  }
  Axpy(2.0 * lambda_reg, store.left_data(), left_grad);
  if (!store.shared()) Axpy(2.0 * lambda_reg, store.right_data(), right_grad);
}

double SumRowNorms(std::span<const double> m, std::size_t dim) {
  if (dim == 0 || m.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t off = 0; off < m.size(); off += dim) {
    sum += std::sqrt(SquaredNorm(m.subspan(off, dim)));
  }
  return sum;
}

double AverageGradientNormWeighted(const EmbeddingStore& store,
                                   const LabeledEdgeSet& data,
                                   std::span<const double> weights,
                                   double lambda_reg) {
  std::vector<double> lg, rg;
  FullGradient(store, data, weights, lambda_reg, lg, rg);
  const std::size_t rows =
      store.n_left() + (store.shared() ? 0 : store.n_right());
  if (rows == 0) return 0.0;
  return (SumRowNorms(lg, store.dim()) + SumRowNorms(rg, store.dim())) /
         static_cast<double>(rows);
}

using internal::PlainAccess;
using internal::RelaxedAccess;

struct StepContext {
  std::span<const double> weights;
  std::span<const double> reg_scale_left;  // 2 l_r / #samples(w)
  std::span<const double> reg_scale_right;
  std::optional<double> clip;
};

template <typename Access>
double DotAccess(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    s += Access::Load(a[k]) * Access::Load(b[k]);
  }
  return s;
}

// x -= gamma * (coef * partner + reg * x), optionally norm-clipped.
template <typename Access>
void MoveRow(std::span<double> x, std::span<const double> partner, double coef,
             double reg, double gamma, const std::optional<double>& clip) {
  double scale = gamma;
  if (clip) {
    double sq = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double g =
          coef * Access::Load(partner[k]) + reg * Access::Load(x[k]);
      sq += g * g;
    }
    const double norm = std::sqrt(sq);
    if (norm > *clip) scale *= *clip / norm;
  }
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double xk = Access::Load(x[k]);
    Access::Store(x[k],
                  xk - scale * (coef * Access::Load(partner[k]) + reg * xk));
  }
}

// One SGD step on sample i. Returns false on a non-finite score.
template <typename Access>
bool Step(EmbeddingStore& store, const Sample& s, std::size_t i, double gamma,
          const StepContext& ctx) {
  auto xa = store.left(s.a);
  auto xb = store.right(s.b);
  const double w = ctx.weights[i];
  const double score = DotAccess<Access>(xa, xb);
  if (!std::isfinite(score)) return false;
  // d/ds of -w log s(y s) is -w y s(-y s).
  MoveRow<Access>(xa, xb, -w * s.y * Sigmoid(-s.y * score),
                  ctx.reg_scale_left[s.a], gamma, ctx.clip);
  const double score2 = DotAccess<Access>(xa, xb);
  if (!std::isfinite(score2)) return false;
  MoveRow<Access>(xb, xa, -w * s.y * Sigmoid(-s.y * score2),
                  ctx.reg_scale_right[s.b], gamma, ctx.clip);
  return true;
}

double StepSize(const SgdConfig& config, int epoch, std::uint64_t update) {
  const double t = config.clock == StepClock::kUpdate
                       ? static_cast<double>(update)
                       : static_cast<double>(epoch);
  return 1.0 / std::sqrt(t + config.lr_c);
}

[[noreturn]] void ThrowNonFinite(int epoch, std::uint64_t step) {
  throw NumericalError("sgd: non-finite value at epoch " +
                       std::to_string(epoch) + ", step " +
                       std::to_string(step));
}

}  // namespace

double SgdLoss(const EmbeddingStore& store, const LabeledEdgeSet& data,
               const SgdConfig& config) {
  const Incidence inc(data, store.n_left(), store.n_right());
  return WeightedLoss(store, data, SampleWeights(data, inc, config),
                      config.lambda_reg);
}

double AverageGradientNorm(const EmbeddingStore& store,
                           const LabeledEdgeSet& data,
                           const SgdConfig& config) {
  const Incidence inc(data, store.n_left(), store.n_right());
  return AverageGradientNormWeighted(
      store, data, SampleWeights(data, inc, config), config.lambda_reg);
}

std::vector<double> VertexGradient(const EmbeddingStore& store, Side side,
                                   VertexId u,
                                   std::span<const VertexId> pos_neighbors,
                                   std::span<const VertexId> neg_neighbors,
                                   const SgdConfig& config) {
  const Side other = store.shared()
                         ? Side::kLeft
                         : (side == Side::kLeft ? Side::kRight : Side::kLeft);
  const auto xu = store.row(side, u);
  std::vector<double> grad(store.dim(), 0.0);
  for (VertexId v : pos_neighbors) {
    const auto xv = store.row(other, v);
    Axpy(-config.lambda_pos * Sigmoid(-Dot(xu, xv)), xv, grad);
  }
  for (VertexId v : neg_neighbors) {
    const auto xv = store.row(other, v);
    Axpy(config.lambda_neg * Sigmoid(Dot(xu, xv)), xv, grad);
  }
  Axpy(2.0 * config.lambda_reg, xu, grad);
  return grad;
}

TrainTrace TrainSgd(const Graph& graph, const LabeledEdgeSet& train,
                    EmbeddingStore& store, const SgdConfig& config,
                    const EpochHook& hook) {
  config.Validate();
  TrainTrace trace;
  trace.trainer = TrainerKind::kSgd;
  if (config.epochs == 0) return trace;
  if (train.empty()) throw ConfigError("sgd: training set is empty");

  LabeledEdgeSet data = train;
  const LabeledEdgeSet positives =
      LabeledEdgeSet::Positives(train.mode, train.EdgesWithLabel(+1));
  std::vector<double> weights, reg_left, reg_right;
  auto prepare = [&] {
    const Incidence inc(data, store.n_left(), store.n_right());
    weights = SampleWeights(data, inc, config);
    auto scales = [&](Side side, std::vector<double>& out) {
      out.assign(store.rows(side), 0.0);
      for (VertexId v = 0; v < out.size(); ++v) {
        const std::size_t c = inc.count(side, v);
        if (c > 0) out[v] = 2.0 * config.lambda_reg / static_cast<double>(c);
      }
    };
    scales(Side::kLeft, reg_left);
    if (store.shared()) {
      reg_right = reg_left;
    } else {
      scales(Side::kRight, reg_right);
    }
  };
  prepare();

  Rng order_rng(config.order_seed);
  std::vector<std::uint32_t> order(data.size());
  std::uint64_t t = 0;
  const auto start = std::chrono::steady_clock::now();
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    if (config.resample_negatives && epoch > 1) {
      NegativeSamplingOptions opts;
      opts.ratio = config.negative_ratio;
      opts.seed =
          DeriveSeed(config.resample_seed, {static_cast<std::uint64_t>(epoch)});
      data = SampleNegatives(graph, positives, opts);
      prepare();
    }
    order.resize(data.size());
    std::iota(order.begin(), order.end(), 0u);
    Shuffle(std::span<std::uint32_t>(order), order_rng);
    const StepContext ctx{weights, reg_left, reg_right, config.clip};

    if (config.threads <= 1) {
      for (std::uint32_t i : order) {
        ++t;
        const double gamma = StepSize(config, epoch, t);
        if (!Step<PlainAccess>(store, data.samples[i], i, gamma, ctx)) {
          ThrowNonFinite(epoch, t);
        }
      }
    } else {
      // Contiguous shards of the shuffled order; each worker uses the step
      // count it would have seen in the sequential schedule.
      const std::size_t workers = config.threads;
      const std::size_t chunk = (order.size() + workers - 1) / workers;
      std::atomic<bool> failed{false};
      std::vector<std::thread> pool;
      const std::uint64_t t0 = t;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          const std::size_t lo = std::min(order.size(), w * chunk);
          const std::size_t hi = std::min(order.size(), lo + chunk);
          for (std::size_t k = lo; k < hi && !failed.load(); ++k) {
            const double gamma =
                StepSize(config, epoch, t0 + (k - lo) * workers + w + 1);
            const std::uint32_t i = order[k];
            if (!Step<RelaxedAccess>(store, data.samples[i], i, gamma, ctx)) {
              failed = true;
            }
          }
        });
      }
      for (auto& th : pool) th.join();
      t += order.size();
      if (failed) ThrowNonFinite(epoch, t);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.avg_norm = ComputeNormReport(store).combined.avg_norm;
    rec.avg_grad_norm =
        AverageGradientNormWeighted(store, data, weights, config.lambda_reg);
    rec.loss = WeightedLoss(store, data, weights, config.lambda_reg);
    if (!std::isfinite(rec.loss) || !store.AllFinite()) {
      ThrowNonFinite(epoch, t);
    }
    if (hook) hook(epoch, store, rec);
    rec.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    trace.records.push_back(rec);
  }
  return trace;
}

}  // namespace lge
