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

// Command-line front end: lge <verb> [options]. Exit status is 0 on
// success, 1 on a runtime failure and 2 on invalid input.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lge/baselines.h"
#include "lge/dcd.h"
#include "lge/embeddings.h"
#include "lge/error.h"
#include "lge/evaluation.h"
#include "lge/experiment.h"
#include "lge/graph.h"
#include "lge/random.h"
#include "lge/sgd.h"
#include "lge/theory.h"
#include "lge/trace.h"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::string out;
};

void Emit(const ordered_json& j, const fs::path& path) {
  if (path.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream f(path);
  if (!f) throw lge::Error("cannot write " + path.string());
  f << j.dump(2) << "\n";
}

lge::GraphMode Mode(const std::string& s) { return lge::ParseGraphMode(s); }

// ---------------------------------------------------------------------------
// Split directories: graph.txt, {train,validation,test}.txt with positives,
// the matching *_neg.txt files with sampled negatives, and split.json.

const char* const kParts[] = {"train", "validation", "test"};

lge::LabeledEdgeSet ToSamples(lge::GraphMode mode,
                              const std::vector<lge::Edge>& pos,
                              const std::vector<lge::Edge>& neg) {
  lge::LabeledEdgeSet s;
  s.mode = mode;
  for (const auto& e : pos) s.samples.push_back({e.a, e.b, +1});
  for (const auto& e : neg) s.samples.push_back({e.a, e.b, -1});
  return s;
}

struct SplitData {
  lge::Graph graph;
  lge::LabeledEdgeSet parts[3];
  json meta;
};

SplitData LoadSplit(const fs::path& dir) {
  SplitData d;
  std::ifstream in(dir / "split.json");
  if (!in) throw lge::ConfigError("no split.json in " + dir.string());
  try {
    d.meta = json::parse(in);
  } catch (const json::exception& e) {
    throw lge::ConfigError("corrupt split.json: " + std::string(e.what()));
  }
  const auto mode = Mode(d.meta.value("mode", "homogeneous"));
  d.graph = lge::LoadEdgeList(dir / "graph.txt", mode);
  for (int i = 0; i < 3; ++i) {
    const std::string part = kParts[i];
    d.parts[i] =
        ToSamples(mode, lge::ReadEdgePairs(dir / (part + ".txt"), mode),
                  lge::ReadEdgePairs(dir / (part + "_neg.txt"), mode));
  }
  return d;
}

void SaveSplit(const fs::path& dir, const lge::Graph& g,
               const lge::LabeledEdgeSet (&parts)[3],
               const std::array<double, 3>& ratio, std::uint64_t seed,
               std::size_t negative_ratio) {
  fs::create_directories(dir);
  lge::SaveGraph(dir / "graph.txt", g);
  ordered_json counts;
  for (int i = 0; i < 3; ++i) {
    const std::string part = kParts[i];
    lge::SaveEdgeList(dir / (part + ".txt"), parts[i].EdgesWithLabel(+1));
    lge::SaveEdgeList(dir / (part + "_neg.txt"), parts[i].EdgesWithLabel(-1));
    counts[part] = {{"pos", parts[i].num_positive()},
                    {"neg", parts[i].num_negative()}};
  }
  ordered_json meta;
  meta["ratio"] = ratio;
  meta["seed"] = seed;
  meta["counts"] = counts;
  meta["mode"] = lge::ToString(g.mode());
  meta["n_left"] = g.n_left();
  meta["n_right"] = g.n_right();
  meta["negative_ratio"] = negative_ratio;
  meta["negatives_reject"] = "full-graph edges";
  Emit(meta, dir / "split.json");
}

struct SplitSeeds {
  std::uint64_t split, neg[3];
};

SplitSeeds SeedsFor(std::uint64_t seed) {
  return {lge::DeriveSeed(seed, {0x73}),
          {lge::DeriveSeed(seed, {0x6e, 0}), lge::DeriveSeed(seed, {0x6e, 2}),
           lge::DeriveSeed(seed, {0x6e, 1})}};
}

SplitData MakeSplit(const lge::Graph& g, const std::array<double, 3>& ratio,
                    std::size_t negatives, std::uint64_t seed) {
  const SplitSeeds s = SeedsFor(seed);
  const lge::Split split = lge::SplitEdges(g, ratio, s.split);
  const lge::LabeledEdgeSet* pos[3] = {&split.train, &split.validation,
                                       &split.test};
  SplitData d;
  d.graph = g;
  for (int i = 0; i < 3; ++i) {
    lge::NegativeSamplingOptions opts;
    opts.ratio = negatives;
    opts.seed = s.neg[i];
    d.parts[i] =
        pos[i]->empty() ? *pos[i] : lge::SampleNegatives(g, *pos[i], opts);
  }
  return d;
}

// Graph formed by the training positives only, for the baselines.
lge::Graph TrainGraph(const SplitData& d) {
  return lge::Graph::FromEdges(d.graph.mode(), d.graph.n_left(),
                               d.graph.n_right(),
                               d.parts[0].EdgesWithLabel(+1));
}

std::vector<int> LoadLabels(const fs::path& path, std::size_t n,
                            int& num_classes) {
  std::ifstream in(path);
  if (!in) throw lge::ConfigError("cannot open labels " + path.string());
  std::vector<int> labels(n, -1);
  std::size_t v;
  int c;
  num_classes = 0;
  while (in >> v >> c) {
    if (v >= n || c < 0) throw lge::ConfigError("bad label line");
    labels[v] = c;
    num_classes = std::max(num_classes, c + 1);
  }
  for (int l : labels) {
    if (l < 0) throw lge::ConfigError("labels file misses some vertices");
  }
  return labels;
}

ordered_json NormsJson(const lge::EmbeddingStore& s) {
  const auto r = lge::ComputeNormReport(s);
  return {{"avg_norm", r.combined.avg_norm},
          {"max_norm", r.combined.max_norm},
          {"total_sq_norm", r.combined.total_sq_norm}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear graph embedding experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "master seed");
  app.add_option("--threads", g.threads, "worker threads")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "output file or directory");

  // generate
  auto* gen = app.add_subcommand("generate", "write a synthetic graph");
  std::string kind;
  lge::GeneratorConfig gc;
  std::optional<double> avg_degree;
  double intra = 0.95;
  gen->add_option("--kind", kind, "erdos_renyi | d_regular | sbm")->required();
  gen->add_option("--n", gc.n, "vertex count")->required();
  gen->add_option("--edges", gc.expected_edges, "expected edges (erdos_renyi)");
  gen->add_option("--degree", gc.degree, "degree (d_regular)");
  gen->add_option("--blocks", gc.blocks, "block count (sbm)");
  gen->add_option("--p-in", gc.p_in, "intra-block probability (sbm)");
  gen->add_option("--p-out", gc.p_out, "inter-block probability (sbm)");
  gen->add_option("--avg-degree", avg_degree,
                  "derive p-in/p-out from this average degree (sbm)");
  gen->add_option("--intra-fraction", intra,
                  "share of the degree inside the block (sbm)");

  // split
  auto* split = app.add_subcommand("split", "split edges and sample negatives");
  std::string graph_path, mode = "homogeneous";
  bool symmetrize = false;
  std::vector<double> ratio{0.5, 0.25, 0.25};
  std::size_t negatives = 4;
  split->add_option("--graph", graph_path, "edge list")->required();
  split->add_option("--mode", mode, "homogeneous | bipartite");
  split->add_flag("--symmetrize", symmetrize, "accept directed input");
  split->add_option("--ratio", ratio, "train,validation,test")
      ->delimiter(',')
      ->expected(3);
  split->add_option("--negatives", negatives, "negatives per positive");

  // train
  auto* train = app.add_subcommand("train", "train embeddings");
  std::string split_dir, trainer = "sgd", clock = "epoch";
  std::size_t dim = 100;
  int epochs = 50, eval_every = 1;
  lge::SgdConfig sgd;
  lge::DcdConfig dcd;
  double lambda_reg = 0.0, init_lo = -0.1, init_hi = 0.1;
  bool no_inner_shuffle = false;
  auto* t_split = train->add_option("--split", split_dir, "split directory");
  auto* t_graph =
      train->add_option("--graph", graph_path, "edge list (split on the fly)");
  t_split->excludes(t_graph);
  train->add_option("--mode", mode, "homogeneous | bipartite");
  train->add_flag("--symmetrize", symmetrize, "accept directed input");
  train->add_option("--ratio", ratio, "split ratio with --graph")
      ->delimiter(',')
      ->expected(3);
  train->add_option("--negatives", negatives, "negatives per positive");
  train->add_option("--trainer", trainer, "sgd | dcd");
  train->add_option("--dim", dim, "embedding dimension");
  train->add_option("--epochs", epochs, "epochs (sgd) or sweeps (dcd)");
  train->add_option("--lambda-reg", lambda_reg, "norm regularizer");
  train->add_option("--lambda-pos", sgd.lambda_pos, "positive weight");
  train->add_option("--lambda-neg", sgd.lambda_neg, "negative weight");
  train->add_option("--kappa", sgd.kappa, "degree-normalized negative weight");
  train->add_option("--lr-c", sgd.lr_c, "step size offset c");
  train->add_option("--clock", clock, "epoch | update");
  train->add_option("--clip", sgd.clip, "per-update gradient norm cap");
  train->add_flag("--resample-negatives", sgd.resample_negatives,
                  "redraw negatives every epoch");
  train->add_option("--kkt-tol", dcd.kkt_tol, "dcd residual tolerance");
  train->add_option("--inner-passes", dcd.max_inner_passes,
                    "dcd passes per vertex visit");
  train->add_flag("--no-inner-shuffle", no_inner_shuffle,
                  "dcd: fixed sample order");
  train->add_option("--eval-every", eval_every, "evaluate every k epochs");
  train->add_option("--init-lo", init_lo);
  train->add_option("--init-hi", init_hi);

  // eval
  auto* eval = app.add_subcommand("eval", "score a split part");
  std::string emb_path, method = "embeddings", part = "test", labels_path;
  std::size_t rank = 16;
  eval->add_option("--split", split_dir, "split directory")->required();
  eval->add_option("--embeddings", emb_path, "embeddings file");
  eval->add_option("--method", method, "embeddings | cn | svd");
  eval->add_option("--rank", rank, "svd rank");
  eval->add_option("--part", part, "train | validation | test");
  eval->add_option("--labels", labels_path,
                   "vertex<TAB>class file for macro-F1");

  // theory
  auto* theory = app.add_subcommand("theory", "generalization bound terms");
  std::size_t draws = 20;
  double loss_bound = 4.0, delta = 0.05;
  bool symmetric = false;
  theory->add_option("--split", split_dir, "split directory")->required();
  theory->add_option("--embeddings", emb_path, "embeddings file")->required();
  theory->add_option("--draws", draws, "sign-matrix draws");
  theory->add_option("--loss-bound", loss_bound, "clip point B");
  theory->add_option("--delta", delta, "confidence delta");
  theory->add_flag("--symmetric-Asigma", symmetric,
                   "two mirrored positions per homogeneous sample");

  // overfit
  auto* overfit = app.add_subcommand("overfit", "fit random labels exactly");
  std::size_t n = 100, degree = 4;
  std::uint64_t label_seed = 0;
  lge::OverfitOptions oo;
  auto* o_graph = overfit->add_option("--graph", graph_path, "regular graph");
  overfit->add_option("--n", n, "vertices when generating")->excludes(o_graph);
  overfit->add_option("--degree", degree, "degree when generating")
      ->excludes(o_graph);
  overfit->add_option("--label-seed", label_seed, "edge label seed");
  overfit->add_option("--epsilon", oo.epsilon, "target margin excess");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run a config-driven sweep");
  std::string config_path;
  sweep->add_option("config", config_path, "JSON config")->required();
  auto* run = app.add_subcommand("run", "alias of sweep");
  run->add_option("config", config_path, "JSON config")->required();

  // report
  auto* report = app.add_subcommand("report", "summarize a sweep directory");
  std::string report_dir;
  report->add_option("dir", report_dir, "sweep output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      gc.kind = lge::ParseGeneratorKind(kind);
      gc.seed = g.seed;
      if (gc.kind == lge::GeneratorKind::kSbm && avg_degree) {
        std::tie(gc.p_in, gc.p_out) =
            lge::SbmProbabilitiesForDegree(gc.n, gc.blocks, *avg_degree, intra);
      }
      const lge::Graph graph = lge::Generate(gc);
      if (g.out.empty()) {
        std::cout << "# vertices " << graph.n_left() << "\n";
        lge::WriteEdgeList(std::cout, graph.edges());
      } else {
        lge::SaveGraph(g.out, graph);
      }
      std::cerr << "generated " << graph.n_left() << " vertices, "
                << graph.num_edges() << " edges\n";
      return 0;
    }

    if (*split) {
      if (g.out.empty()) throw lge::ConfigError("split: --out is required");
      lge::LoadOptions lo;
      lo.symmetrize = symmetrize;
      const lge::Graph graph = lge::LoadEdgeList(graph_path, Mode(mode), lo);
      const std::array<double, 3> r{ratio[0], ratio[1], ratio[2]};
      const SplitData d = MakeSplit(graph, r, negatives, g.seed);
      SaveSplit(g.out, graph, d.parts, r, g.seed, negatives);
      std::cerr << "split written to " << g.out << "\n";
      return 0;
    }

    if (*train) {
      if (g.out.empty()) throw lge::ConfigError("train: --out is required");
      SplitData d;
      if (!split_dir.empty()) {
        d = LoadSplit(split_dir);
      } else if (!graph_path.empty()) {
        lge::LoadOptions lo;
        lo.symmetrize = symmetrize;
        d = MakeSplit(lge::LoadEdgeList(graph_path, Mode(mode), lo),
                      {ratio[0], ratio[1], ratio[2]}, negatives, g.seed);
      } else {
        throw lge::ConfigError("train: give --split or --graph");
      }
      const lge::Graph& graph = d.graph;
      const std::uint64_t init_seed = lge::DeriveSeed(g.seed, {1});
      const std::uint64_t order_seed = lge::DeriveSeed(g.seed, {2});
      const std::uint64_t eval_seed = lge::DeriveSeed(g.seed, {3});
      lge::EmbeddingStore store =
          lge::InitUniform(graph.mode(), graph.n_left(), graph.n_right(), dim,
                           init_lo, init_hi, init_seed);
      if (eval_every < 1) throw lge::ConfigError("--eval-every must be >= 1");
      auto hook = [&](int epoch, const lge::EmbeddingStore& s,
                      lge::EpochRecord& rec) {
        if (epoch % eval_every != 0 && epoch != epochs) return;
        rec.train_ap = lge::LinkPredictionAp(s, d.parts[0], eval_seed).value;
        if (!d.parts[2].empty()) {
          rec.test_ap = lge::LinkPredictionAp(s, d.parts[2], eval_seed).value;
        }
      };
      fs::create_directories(g.out);
      lge::TrainTrace trace;
      ordered_json metrics;
      if (trainer == "sgd") {
        sgd.lambda_reg = lambda_reg;
        sgd.epochs = epochs;
        sgd.order_seed = order_seed;
        sgd.resample_seed = lge::DeriveSeed(g.seed, {4});
        sgd.negative_ratio = negatives;
        sgd.threads = g.threads;
        if (clock == "epoch") {
          sgd.clock = lge::StepClock::kEpoch;
        } else if (clock == "update") {
          sgd.clock = lge::StepClock::kUpdate;
        } else {
          throw lge::ConfigError("--clock must be epoch or update");
        }
        trace = lge::TrainSgd(graph, d.parts[0], store, sgd, hook);
      } else if (trainer == "dcd") {
        dcd.lambda_pos = sgd.lambda_pos;
        dcd.lambda_neg = sgd.lambda_neg;
        dcd.lambda_reg = lambda_reg;
        dcd.sweeps = epochs;
        dcd.order_seed = order_seed;
        dcd.inner_shuffle = !no_inner_shuffle;
        dcd.threads = g.threads;
        auto r = lge::TrainDcd(d.parts[0], store, dcd, hook);
        trace = std::move(r.trace);
        metrics["dcd"] = {
            {"mean_kkt", r.diagnostics.mean_kkt},
            {"max_kkt", r.diagnostics.max_kkt},
            {"max_primal_dual_gap", r.diagnostics.max_primal_dual_gap},
            {"skipped_zero", r.diagnostics.skipped_zero},
            {"duals_feasible", r.diagnostics.duals_feasible}};
      } else {
        throw lge::ConfigError("--trainer must be sgd or dcd");
      }
      const fs::path out = g.out;
      lge::SaveEmbeddings(out / "embeddings.txt", store);
      Emit({{"seed", g.seed},
            {"init_seed", init_seed},
            {"epoch", trace.records.size()},
            {"trainer", trainer},
            {"dim", dim},
            {"lambda_reg", lambda_reg}},
           out / "embeddings.json");
      {
        std::ofstream csv(out / "trace.csv");
        lge::WriteTraceCsv(csv, trace);
        std::ofstream jsonl(out / "trace.jsonl");
        lge::WriteTraceJsonl(jsonl, trace);
      }
      metrics["trainer"] = trainer;
      metrics["seed"] = g.seed;
      if (!d.parts[2].empty()) {
        metrics["test_ap"] =
            lge::ApToJson(lge::LinkPredictionAp(store, d.parts[2], eval_seed));
      }
      metrics["train_ap"] =
          lge::ApToJson(lge::LinkPredictionAp(store, d.parts[0], eval_seed));
      metrics["norms"] = NormsJson(store);
      Emit(metrics, out / "metrics.json");
      std::cerr << "trained " << trace.records.size() << " epochs into "
                << g.out << "\n";
      return 0;
    }

    if (*eval) {
      const SplitData d = LoadSplit(split_dir);
      int idx = part == "train" ? 0 : part == "validation" ? 1 : 2;
      if (part != "train" && part != "validation" && part != "test") {
        throw lge::ConfigError("--part must be train, validation or test");
      }
      const lge::LabeledEdgeSet& set = d.parts[idx];
      const std::uint64_t eval_seed = lge::DeriveSeed(g.seed, {3});
      ordered_json out;
      out["part"] = part;
      out["method"] = method;
      std::optional<lge::EmbeddingStore> store;
      if (method == "embeddings") {
        if (emb_path.empty()) throw lge::ConfigError("--embeddings required");
        store = lge::LoadEmbeddings(emb_path);
        out["ap"] =
            lge::ApToJson(lge::LinkPredictionAp(*store, set, eval_seed));
      } else if (method == "cn") {
        out["ap"] =
            lge::ApToJson(lge::CommonNeighborAp(TrainGraph(d), set, eval_seed));
      } else if (method == "svd") {
        lge::SvdOptions so;
        so.rank = rank;
        so.seed = g.seed;
        auto f = lge::TruncatedSvd(TrainGraph(d), so);
        out["singular_values"] = f.values;
        out["svd_residual"] = f.residual;
        out["ap"] =
            lge::ApToJson(lge::LinkPredictionAp(f.factors, set, eval_seed));
        store = std::move(f.factors);
      } else {
        throw lge::ConfigError("--method must be embeddings, cn or svd");
      }
      if (!labels_path.empty()) {
        if (!store) throw lge::ConfigError("macro-F1 needs vector features");
        int k = 0;
        auto labels = LoadLabels(labels_path, store->n_left(), k);
        const auto task = lge::MakeLabelTask(std::move(labels), k, 0.5,
                                             lge::DeriveSeed(g.seed, {5}));
        out["macro_f1"] = lge::EvaluateMacroF1(*store, task);
      }
      Emit(out, g.out);
      return 0;
    }

    if (*theory) {
      const SplitData d = LoadSplit(split_dir);
      const lge::EmbeddingStore store = lge::LoadEmbeddings(emb_path);
      lge::BoundOptions bo;
      bo.loss_bound = loss_bound;
      bo.delta = delta;
      bo.spectral.n_draws = draws;
      bo.spectral.seed = g.seed;
      bo.spectral.symmetric = symmetric;
      const auto r = lge::ComputeBoundReport(store, d.parts[0], d.parts[2], bo);
      ordered_json out = lge::ToJson(r);
      const double m = static_cast<double>(d.parts[0].size());
      out["erdos_renyi"] = {
          {"n", d.graph.n_left()},
          {"m", m},
          {"estimate_8", lge::ErdosRenyiEstimate(d.graph.n_left(), m)},
          {"scale", lge::ErdosRenyiScale(d.graph.n_left(), m)}};
      Emit(out, g.out);
      return 0;
    }

    if (*overfit) {
      lge::Graph graph;
      if (!graph_path.empty()) {
        graph = lge::LoadEdgeList(graph_path, lge::GraphMode::kHomogeneous);
      } else {
        lge::GeneratorConfig rc;
        rc.kind = lge::GeneratorKind::kDRegular;
        rc.n = n;
        rc.degree = degree;
        rc.seed = g.seed;
        graph = lge::Generate(rc);
      }
      const auto labels = lge::RandomEdgeLabels(graph.num_edges(), label_seed);
      oo.seed = g.seed;
      const auto r = lge::ConstructOverfit(graph, labels, label_seed, oo);
      ordered_json out = lge::ToJson(r.certificate);
      out["verified"] =
          lge::VerifyCertificate(graph, labels, r.embedding, r.certificate);
      Emit(out, g.out);
      return r.certificate.success ? 0 : 1;
    }

    if (*sweep || *run) {
      json raw;
      {
        std::ifstream in(config_path);
        if (!in) throw lge::ConfigError("cannot open " + config_path);
        try {
          raw = json::parse(in);
        } catch (const json::exception& e) {
          throw lge::ConfigError("config: " + std::string(e.what()));
        }
      }
      if (!g.out.empty()) raw["output"] = g.out;
      if (app.count("--seed")) raw["seed"] = g.seed;
      if (app.count("--threads")) raw["threads"] = g.threads;
      const lge::ExperimentConfig config = lge::ParseExperimentConfig(raw);
      const auto manifest = lge::RunExperiment(config, std::cerr);
      std::cout << manifest["output_hash"].get<std::string>() << "\n";
      return 0;
    }

    if (*report) {
      const lge::Report r = lge::BuildReport(report_dir);
      lge::WriteReportTable(std::cout, r);
      Emit(lge::ToJson(r), fs::path(report_dir) / "report.json");
      return 0;
    }
  } catch (const lge::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const lge::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
