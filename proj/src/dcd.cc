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
#include <cassert>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>
#include <thread>

#include "lge/error.h"
#include "lge/numeric.h"
#include "relaxed_access.h"

namespace lge {

void DcdConfig::Validate() const {
  if (!(lambda_pos > 0.0)) throw ConfigError("dcd: lambda_pos must be > 0");
  if (!(lambda_neg > 0.0)) throw ConfigError("dcd: lambda_neg must be > 0");
  if (!(lambda_reg > 0.0)) {
    throw ConfigError(
        "dcd: lambda_reg must be > 0; the per-vertex subproblem bounds each "
        "dual by lambda_y / lambda_reg (use e.g. 1e-3 for a near-zero run)");
  }
  if (sweeps < 0) throw ConfigError("dcd: sweeps must be >= 0");
  if (!(kkt_tol > 0.0)) throw ConfigError("dcd: kkt_tol must be > 0");
  if (max_inner_passes < 1) {
    throw ConfigError("dcd: max_inner_passes must be >= 1");
  }
  if (threads < 1) throw ConfigError("dcd: threads must be >= 1");
}

double HingeLoss(const EmbeddingStore& store, const LabeledEdgeSet& data,
                 const DcdConfig& config) {
  double loss = 0.0;
  for (const Sample& s : data.samples) {
    const double lambda = s.y > 0 ? config.lambda_pos : config.lambda_neg;
    loss += lambda * std::max(1.0 - s.y * store.Dot(s.a, s.b), 0.0);
  }
  double sq = SquaredNorm(store.left_data());
  if (!store.shared()) sq += SquaredNorm(store.right_data());
  return loss + 0.5 * config.lambda_reg * sq;
}

// ---------------------------------------------------------------------------

SolveStats SolveSubproblem(std::span<const DualTerm> terms,
                           std::span<const std::size_t> order,
                           std::span<double> w) {
  SolveStats stats;
  std::fill(w.begin(), w.end(), 0.0);
  for (const DualTerm& t : terms) {
    if (*t.alpha != 0.0) Axpy(*t.alpha * t.y, t.x, w);
  }
  auto visit = [&](const DualTerm& t) {
    const double g = t.y * Dot(w, t.x) - 1.0;
    double& alpha = *t.alpha;
    double pg = g;
    if (alpha == 0.0) {
      pg = std::min(g, 0.0);
    } else if (alpha == t.upper) {
      pg = std::max(g, 0.0);
    }
    if (pg == 0.0) return;
    const double q = SquaredNorm(t.x);
    if (q == 0.0) {
      ++stats.skipped_zero;
      return;
    }
    const double old = alpha;
    alpha = std::min(std::max(alpha - g / q, 0.0), t.upper);
    assert(alpha >= 0.0 && alpha <= t.upper);
    if (alpha != old) Axpy((alpha - old) * t.y, t.x, w);
    ++stats.updates;
  };
  if (order.empty()) {
    for (const DualTerm& t : terms) visit(t);
  } else {
    for (std::size_t i : order) visit(terms[i]);
  }
  return stats;
}

double SubproblemKktResidual(std::span<const DualTerm> terms,
                             std::span<const double> w) {
  double worst = 0.0;
  for (const DualTerm& t : terms) {
    if (SquaredNorm(t.x) == 0.0) continue;
    const double g = t.y * Dot(w, t.x) - 1.0;
    double r;
    if (*t.alpha == 0.0) {
      r = std::max(0.0, -g);
    } else if (*t.alpha == t.upper) {
      r = std::max(0.0, g);
    } else {
      r = std::abs(g);
    }
    worst = std::max(worst, r);
  }
  return worst;
}

double SubproblemPrimal(std::span<const DualTerm> terms,
                        std::span<const double> w) {
  double value = 0.5 * SquaredNorm(w);
  for (const DualTerm& t : terms) {
    value += t.upper * std::max(1.0 - t.y * Dot(w, t.x), 0.0);
  }
  return value;
}

double SubproblemDual(std::span<const DualTerm> terms) {
  if (terms.empty()) return 0.0;
  std::vector<double> w(terms.front().x.size(), 0.0);
  double sum = 0.0;
  for (const DualTerm& t : terms) {
    sum += *t.alpha;
    Axpy(*t.alpha * t.y, t.x, w);
  }
  return sum - 0.5 * SquaredNorm(w);
}

// ---------------------------------------------------------------------------

DcdProblem::DcdProblem(const LabeledEdgeSet& train_set,
                       const EmbeddingStore& store)
    : train(&train_set),
      incidence(train_set, store.n_left(), store.n_right()),
      duals(train_set.size()) {}

namespace {

std::vector<DualTerm> BuildTerms(Side side, VertexId u,
                                 const EmbeddingStore& store,
                                 const DcdProblem& problem,
                                 const DcdConfig& config) {
  const auto entries = problem.incidence.of(side, u);
  const Side other = problem.incidence.other_side(side);
  std::vector<DualTerm> terms;
  terms.reserve(entries.size());
  auto& duals = const_cast<DualState&>(problem.duals);
  for (const auto& e : entries) {
    const int y = problem.train->samples[e.sample].y;
    terms.push_back({store.row(other, e.other), y, config.upper(y),
                     &duals.at(e.sample, e.slot)});
  }
  return terms;
}

// Parallel variant: neighbor rows are snapshotted with relaxed loads so the
// solve never reads a row another thread is writing.
SolveStats SolveVertexRelaxed(Side side, VertexId u, EmbeddingStore& store,
                              DcdProblem& problem, const DcdConfig& config,
                              Rng* rng) {
  using internal::RelaxedAccess;
  std::vector<DualTerm> terms = BuildTerms(side, u, store, problem, config);
  const std::size_t dim = store.dim();
  std::vector<double> snapshot(terms.size() * dim);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    for (std::size_t k = 0; k < dim; ++k) {
      snapshot[i * dim + k] = RelaxedAccess::Load(terms[i].x[k]);
    }
    terms[i].x = std::span<const double>(snapshot).subspan(i * dim, dim);
  }
  std::vector<std::size_t> order(terms.size());
  std::iota(order.begin(), order.end(), 0);
  if (config.inner_shuffle && rng) Shuffle(std::span<std::size_t>(order), *rng);
  std::vector<double> w(dim);
  SolveStats stats = SolveSubproblem(terms, order, w);
  for (int pass = 1; pass < config.max_inner_passes &&
                     SubproblemKktResidual(terms, w) > config.kkt_tol;
       ++pass) {
    if (config.inner_shuffle && rng) {
      Shuffle(std::span<std::size_t>(order), *rng);
    }
    stats.skipped_zero += SolveSubproblem(terms, order, w).skipped_zero;
  }
  auto row = store.row(side, u);
  for (std::size_t k = 0; k < dim; ++k) RelaxedAccess::Store(row[k], w[k]);
  return stats;
}

}  // namespace

SolveStats SolveVertex(Side side, VertexId u, EmbeddingStore& store,
                       DcdProblem& problem, const DcdConfig& config, Rng* rng) {
  const std::vector<DualTerm> terms =
      BuildTerms(side, u, store, problem, config);
  std::vector<std::size_t> order(terms.size());
  std::iota(order.begin(), order.end(), 0);
  if (config.inner_shuffle && rng) Shuffle(std::span<std::size_t>(order), *rng);
  std::vector<double> w(store.dim());
  const SolveStats stats = SolveSubproblem(terms, order, w);
  std::copy(w.begin(), w.end(), store.row(side, u).begin());
  return stats;
}

double VertexKktResidual(Side side, VertexId u, const EmbeddingStore& store,
                         const DcdProblem& problem, const DcdConfig& config) {
  const auto terms = BuildTerms(side, u, store, problem, config);
  return SubproblemKktResidual(terms, store.row(side, u));
}

double PrimalDualGap(Side side, VertexId u, const EmbeddingStore& store,
                     const DcdProblem& problem) {
  const auto entries = problem.incidence.of(side, u);
  const Side other = problem.incidence.other_side(side);
  std::vector<double> w(store.dim(), 0.0);
  for (const auto& e : entries) {
    const double a = problem.duals.at(e.sample, e.slot);
    Axpy(a * problem.train->samples[e.sample].y, store.row(other, e.other), w);
  }
  const auto x = store.row(side, u);
  double gap = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    gap = std::max(gap, std::abs(x[k] - w[k]));
  }
  return gap;
}

bool DualsFeasible(const DcdProblem& problem, const DcdConfig& config) {
  const auto& samples = problem.train->samples;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double upper = config.upper(samples[i].y);
    for (int slot = 0; slot < 2; ++slot) {
      const double a = problem.duals.at(i, slot);
      if (!(a >= 0.0 && a <= upper)) return false;
    }
  }
  return true;
}

namespace {

std::vector<std::pair<Side, VertexId>> AllVertices(
    const EmbeddingStore& store) {
  std::vector<std::pair<Side, VertexId>> out;
  for (VertexId v = 0; v < store.n_left(); ++v) out.push_back({Side::kLeft, v});
  if (!store.shared()) {
    for (VertexId v = 0; v < store.n_right(); ++v) {
      out.push_back({Side::kRight, v});
    }
  }
  return out;
}

// Mean l2 norm over rows of a subgradient of the hinge objective.
double AverageSubgradientNorm(const EmbeddingStore& store,
                              const LabeledEdgeSet& data,
                              const DcdConfig& config) {
  const std::size_t dim = store.dim();
  std::vector<double> left(store.left_data().begin(), store.left_data().end());
  std::vector<double> right(store.shared() ? 0 : store.right_data().size());
  for (double& x : left) x *= config.lambda_reg;
  if (!store.shared()) {
    for (std::size_t i = 0; i < right.size(); ++i) {
      right[i] = config.lambda_reg * store.right_data()[i];
    }
  }
  std::vector<double>& rg = store.shared() ? left : right;
  for (const Sample& s : data.samples) {
    const auto xa = store.left(s.a);
    const auto xb = store.right(s.b);
    if (s.y * Dot(xa, xb) >= 1.0) continue;
    const double coef =
        -(s.y > 0 ? config.lambda_pos : config.lambda_neg) * s.y;
    Axpy(coef, xb, std::span<double>(left).subspan(s.a * dim, dim));
    Axpy(coef, xa, std::span<double>(rg).subspan(s.b * dim, dim));
  }
  double sum = 0.0;
  for (std::size_t off = 0; off < left.size(); off += dim) {
    sum +=
        std::sqrt(SquaredNorm(std::span<const double>(left).subspan(off, dim)));
  }
  for (std::size_t off = 0; off < right.size(); off += dim) {
    sum += std::sqrt(
        SquaredNorm(std::span<const double>(right).subspan(off, dim)));
  }
  const std::size_t rows =
      store.n_left() + (store.shared() ? 0 : store.n_right());
  return rows ? sum / static_cast<double>(rows) : 0.0;
}

}  // namespace

DcdDiagnostics ComputeDiagnostics(const EmbeddingStore& store,
                                  const DcdProblem& problem,
                                  const DcdConfig& config) {
  DcdDiagnostics d;
  std::size_t counted = 0;
  for (const auto& [side, v] : AllVertices(store)) {
    if (problem.incidence.count(side, v) == 0) continue;
    const double r = VertexKktResidual(side, v, store, problem, config);
    d.mean_kkt += r;
    d.max_kkt = std::max(d.max_kkt, r);
    ++counted;
  }
  if (counted) d.mean_kkt /= static_cast<double>(counted);
  d.duals_feasible = DualsFeasible(problem, config);
  return d;
}

DcdResult TrainDcd(const LabeledEdgeSet& train, EmbeddingStore& store,
                   const DcdConfig& config, const EpochHook& hook) {
  config.Validate();
  DcdResult result;
  result.trace.trainer = TrainerKind::kDcd;
  if (config.sweeps == 0) return result;
  if (train.empty()) throw ConfigError("dcd: training set is empty");

  DcdProblem problem(train, store);
  auto vertices = AllVertices(store);
  Rng rng(config.order_seed);
  std::size_t skipped = 0;
  double last_gap = 0.0;
  const auto start = std::chrono::steady_clock::now();
  for (int sweep = 1; sweep <= config.sweeps; ++sweep) {
    Shuffle(std::span<std::pair<Side, VertexId>>(vertices), rng);
    const bool last = sweep == config.sweeps;
    last_gap = 0.0;
    if (config.threads <= 1) {
      for (const auto& [side, v] : vertices) {
        skipped +=
            SolveVertex(side, v, store, problem, config, &rng).skipped_zero;
        for (int pass = 1; pass < config.max_inner_passes &&
                           VertexKktResidual(side, v, store, problem, config) >
                               config.kkt_tol;
             ++pass) {
          skipped +=
              SolveVertex(side, v, store, problem, config, &rng).skipped_zero;
        }
        if (last) {
          last_gap = std::max(last_gap, PrimalDualGap(side, v, store, problem));
        }
      }
    } else {
      const std::size_t workers = config.threads;
      const std::size_t chunk = (vertices.size() + workers - 1) / workers;
      std::vector<std::thread> pool;
      std::vector<std::size_t> skipped_by(workers, 0);
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          Rng local(DeriveSeed(config.order_seed,
                               {static_cast<std::uint64_t>(sweep), w}));
          const std::size_t lo = std::min(vertices.size(), w * chunk);
          const std::size_t hi = std::min(vertices.size(), lo + chunk);
          for (std::size_t k = lo; k < hi; ++k) {
            const auto [side, v] = vertices[k];
            skipped_by[w] +=
                SolveVertexRelaxed(side, v, store, problem, config, &local)
                    .skipped_zero;
          }
        });
      }
      for (auto& th : pool) th.join();
      for (std::size_t s : skipped_by) skipped += s;
    }

    EpochRecord rec;
    rec.epoch = sweep;
    rec.avg_norm = ComputeNormReport(store).combined.avg_norm;
    rec.avg_grad_norm = AverageSubgradientNorm(store, train, config);
    rec.loss = HingeLoss(store, train, config);
    if (!std::isfinite(rec.loss) || !store.AllFinite()) {
      throw NumericalError("dcd: non-finite value after sweep " +
                           std::to_string(sweep));
    }
    if (hook) hook(sweep, store, rec);
    rec.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    result.trace.records.push_back(rec);
  }
  result.diagnostics = ComputeDiagnostics(store, problem, config);
  result.diagnostics.max_primal_dual_gap = last_gap;
  result.diagnostics.skipped_zero = skipped;
  return result;
}

}  // namespace lge
