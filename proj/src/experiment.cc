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

#include "lge/experiment.h"

#include <algorithm>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "lge/embeddings.h"
#include "lge/error.h"
#include "lge/evaluation.h"
#include "lge/hash.h"
#include "lge/random.h"

namespace lge {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Collects field-level problems instead of stopping at the first one.
class Parser {
 public:
  void Fail(const std::string& path, const std::string& message) {
    errors_.push_back(path + ": " + message);
  }
  const std::vector<std::string>& errors() const { return errors_; }

  // Flags keys of `obj` that are not in `known`.
  void Known(const json& obj, const std::string& path,
             std::initializer_list<std::string_view> known) {
    for (const auto& [key, value] : obj.items()) {
      if (std::find(known.begin(), known.end(), key) == known.end()) {
        Fail(Join(path, key), "unknown field");
      }
    }
  }

  const json* Object(const json& obj, const char* key,
                     const std::string& path) {
    const auto it = obj.find(key);
    if (it == obj.end()) return nullptr;
    if (!it->is_object()) {
      Fail(Join(path, key), "expected an object");
      return nullptr;
    }
    return &*it;
  }

  void Real(const json& obj, const char* key, const std::string& path,
            double& out) {
    const auto it = obj.find(key);
    if (it == obj.end()) return;
    if (!it->is_number()) return Fail(Join(path, key), "expected a number");
    out = it->get<double>();
  }
  void Real(const json& obj, const char* key, const std::string& path,
            std::optional<double>& out) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return;
    double v = 0.0;
    Real(obj, key, path, v);
    out = v;
  }
  template <typename T>
  void Count(const json& obj, const char* key, const std::string& path,
             T& out) {
    const auto it = obj.find(key);
    if (it == obj.end()) return;
    out = CountValue<T>(*it, Join(path, key)).value_or(out);
  }
  void Seed(const json& obj, const char* key, const std::string& path,
            std::optional<std::uint64_t>& out) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return;
    out = CountValue<std::uint64_t>(*it, Join(path, key));
  }
  void Int(const json& obj, const char* key, const std::string& path,
           int& out) {
    const auto it = obj.find(key);
    if (it == obj.end()) return;
    if (!it->is_number_integer()) {
      return Fail(Join(path, key), "expected an integer");
    }
    out = it->get<int>();
  }
  void Bool(const json& obj, const char* key, const std::string& path,
            bool& out) {
    const auto it = obj.find(key);
    if (it == obj.end()) return;
    if (!it->is_boolean()) return Fail(Join(path, key), "expected true/false");
    out = it->get<bool>();
  }
  void Text(const json& obj, const char* key, const std::string& path,
            std::string& out) {
    const auto it = obj.find(key);
    if (it == obj.end()) return;
    if (!it->is_string()) return Fail(Join(path, key), "expected a string");
    out = it->get<std::string>();
  }

  template <typename T>
  std::optional<T> CountValue(const json& v, const std::string& path) {
    if (!v.is_number_unsigned() &&
        !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      Fail(path, "expected a non-negative integer");
      return std::nullopt;
    }
    return static_cast<T>(v.get<std::uint64_t>());
  }

  static std::string Join(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
  }

 private:
  std::vector<std::string> errors_;
};

std::string FormatReal(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void WriteFile(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  if (!out) throw Error("write failed: " + path.string());
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string_view ToString(TrainerKind t) {
  return t == TrainerKind::kSgd ? "sgd" : "dcd";
}

std::string_view ToString(StepClock c) {
  return c == StepClock::kEpoch ? "epoch" : "update";
}

}  // namespace

ExperimentConfig ParseExperimentConfig(const json& j) {
  ExperimentConfig c;
  Parser p;
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  p.Known(j, "",
          {"graph", "split", "negatives", "trainer", "sgd", "dcd", "init",
           "sweep", "eval", "output", "seed", "threads", "decline_threshold"});

  if (const json* g = p.Object(j, "graph", "")) {
    p.Known(*g, "graph",
            {"path", "mode", "symmetrize", "generator", "n", "expected_edges",
             "degree", "blocks", "p_in", "p_out", "avg_degree",
             "intra_fraction", "seed"});
    std::string path, mode = "homogeneous", kind;
    p.Text(*g, "path", "graph", path);
    p.Text(*g, "mode", "graph", mode);
    p.Text(*g, "generator", "graph", kind);
    p.Bool(*g, "symmetrize", "graph", c.graph.symmetrize);
    try {
      c.graph.mode = ParseGraphMode(mode);
    } catch (const Error& e) {
      p.Fail("graph.mode", e.what());
    }
    if (!path.empty()) c.graph.path = path;
    if (!path.empty() && !kind.empty()) {
      p.Fail("graph", "give either path or generator, not both");
    }
    if (path.empty() && kind.empty()) {
      p.Fail("graph", "one of path or generator is required");
    }
    if (!kind.empty()) {
      try {
        c.graph.generator.kind = ParseGeneratorKind(kind);
      } catch (const Error& e) {
        p.Fail("graph.generator", e.what());
      }
      if (c.graph.mode != GraphMode::kHomogeneous) {
        p.Fail("graph.mode", "generators produce homogeneous graphs");
      }
    }
    p.Count(*g, "n", "graph", c.graph.generator.n);
    p.Real(*g, "expected_edges", "graph", c.graph.generator.expected_edges);
    p.Count(*g, "degree", "graph", c.graph.generator.degree);
    p.Count(*g, "blocks", "graph", c.graph.generator.blocks);
    p.Real(*g, "p_in", "graph", c.graph.generator.p_in);
    p.Real(*g, "p_out", "graph", c.graph.generator.p_out);
    p.Real(*g, "avg_degree", "graph", c.graph.avg_degree);
    p.Real(*g, "intra_fraction", "graph", c.graph.intra_fraction);
    p.Seed(*g, "seed", "graph", c.graph.seed);
  } else {
    p.Fail("graph", "required");
  }

  if (const json* s = p.Object(j, "split", "")) {
    p.Known(*s, "split", {"ratio"});
    if (const auto it = s->find("ratio"); it != s->end()) {
      if (!it->is_array() || it->size() != 3) {
        p.Fail("split.ratio", "expected three numbers");
      } else {
        for (std::size_t i = 0; i < 3; ++i) {
          if (!(*it)[i].is_number()) {
            p.Fail("split.ratio", "expected three numbers");
            break;
          }
          c.split_ratio[i] = (*it)[i].get<double>();
        }
      }
    }
  }
  if (const json* n = p.Object(j, "negatives", "")) {
    p.Known(*n, "negatives", {"ratio"});
    p.Count(*n, "ratio", "negatives", c.negative_ratio);
  }

  std::string trainer = "sgd";
  p.Text(j, "trainer", "", trainer);
  if (trainer == "sgd") {
    c.trainer = TrainerKind::kSgd;
  } else if (trainer == "dcd") {
    c.trainer = TrainerKind::kDcd;
  } else {
    p.Fail("trainer", "expected \"sgd\" or \"dcd\", got \"" + trainer + "\"");
  }

  if (const json* s = p.Object(j, "sgd", "")) {
    p.Known(*s, "sgd",
            {"lambda_pos", "lambda_neg", "kappa", "lr_c", "clock", "clip",
             "resample_negatives"});
    p.Real(*s, "lambda_pos", "sgd", c.sgd.lambda_pos);
    p.Real(*s, "lambda_neg", "sgd", c.sgd.lambda_neg);
    p.Real(*s, "kappa", "sgd", c.sgd.kappa);
    p.Real(*s, "lr_c", "sgd", c.sgd.lr_c);
    p.Real(*s, "clip", "sgd", c.sgd.clip);
    p.Bool(*s, "resample_negatives", "sgd", c.sgd.resample_negatives);
    std::string clock = "epoch";
    p.Text(*s, "clock", "sgd", clock);
    if (clock == "epoch") {
      c.sgd.clock = StepClock::kEpoch;
    } else if (clock == "update") {
      c.sgd.clock = StepClock::kUpdate;
    } else {
      p.Fail("sgd.clock", "expected \"epoch\" or \"update\"");
    }
  }
  if (const json* d = p.Object(j, "dcd", "")) {
    p.Known(*d, "dcd",
            {"lambda_pos", "lambda_neg", "inner_shuffle", "kkt_tol",
             "max_inner_passes"});
    p.Real(*d, "lambda_pos", "dcd", c.dcd.lambda_pos);
    p.Real(*d, "lambda_neg", "dcd", c.dcd.lambda_neg);
    p.Bool(*d, "inner_shuffle", "dcd", c.dcd.inner_shuffle);
    p.Real(*d, "kkt_tol", "dcd", c.dcd.kkt_tol);
    p.Int(*d, "max_inner_passes", "dcd", c.dcd.max_inner_passes);
  }
  if (const json* i = p.Object(j, "init", "")) {
    p.Known(*i, "init", {"lo", "hi"});
    p.Real(*i, "lo", "init", c.init_lo);
    p.Real(*i, "hi", "init", c.init_hi);
  }

  if (const json* s = p.Object(j, "sweep", "")) {
    p.Known(*s, "sweep", {"lambda_reg", "dim", "epochs"});
    auto axis = [&](const char* key, auto& out, auto convert) {
      const auto it = s->find(key);
      if (it == s->end()) return;
      const std::string path = std::string("sweep.") + key;
      if (!it->is_array()) return p.Fail(path, "expected a list");
      out.clear();
      for (const json& v : *it) {
        if (auto x = convert(v, path)) out.push_back(*x);
      }
      if (it->empty()) p.Fail(path, "axis is empty");
    };
    axis("lambda_reg", c.lambda_reg,
         [&](const json& v, const std::string& path) -> std::optional<double> {
           if (!v.is_number()) {
             p.Fail(path, "expected numbers");
             return std::nullopt;
           }
           return v.get<double>();
         });
    axis("dim", c.dim, [&](const json& v, const std::string& path) {
      return p.CountValue<std::size_t>(v, path);
    });
    axis("epochs", c.epochs,
         [&](const json& v, const std::string& path) -> std::optional<int> {
           if (!v.is_number_integer()) {
             p.Fail(path, "expected integers");
             return std::nullopt;
           }
           return v.get<int>();
         });
  }

  if (const json* e = p.Object(j, "eval", "")) {
    p.Known(*e, "eval", {"every", "train_ap", "macro_f1", "theory"});
    p.Int(*e, "every", "eval", c.eval_every);
    p.Bool(*e, "train_ap", "eval", c.eval_train_ap);
    p.Bool(*e, "macro_f1", "eval", c.eval_macro_f1);
    if (const json* t = p.Object(*e, "theory", "eval")) {
      p.Known(*t, "eval.theory",
              {"enabled", "draws", "loss_bound", "delta", "symmetric"});
      c.theory.enabled = true;
      p.Bool(*t, "enabled", "eval.theory", c.theory.enabled);
      p.Count(*t, "draws", "eval.theory", c.theory.draws);
      p.Real(*t, "loss_bound", "eval.theory", c.theory.loss_bound);
      p.Real(*t, "delta", "eval.theory", c.theory.delta);
      p.Bool(*t, "symmetric", "eval.theory", c.theory.symmetric);
    }
  }
  std::string output = c.output.string();
  p.Text(j, "output", "", output);
  c.output = output;
  if (const auto it = j.find("seed"); it != j.end()) {
    c.seed = p.CountValue<std::uint64_t>(*it, "seed").value_or(0);
  }
  p.Count(j, "threads", "", c.threads);
  p.Real(j, "decline_threshold", "", c.decline_threshold);

  // Semantic checks.
  auto check = [&](const std::string& path, auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      p.Fail(path, e.what());
    }
  };
  if (!c.graph.path) {
    GeneratorConfig gen = c.graph.generator;
    if (gen.kind == GeneratorKind::kSbm && c.graph.avg_degree) {
      if (!(c.graph.intra_fraction >= 0.0 && c.graph.intra_fraction <= 1.0)) {
        p.Fail("graph.intra_fraction", "must be in [0, 1]");
      } else if (gen.n > 0 && gen.blocks > 0) {
        check("graph", [&] {
          std::tie(gen.p_in, gen.p_out) = SbmProbabilitiesForDegree(
              gen.n, gen.blocks, *c.graph.avg_degree, c.graph.intra_fraction);
        });
      }
    }
    check("graph", [&] { gen.Validate(); });
  }
  check("split.ratio", [&] { LargestRemainderSizes(0, c.split_ratio); });
  if (c.negative_ratio < 1) p.Fail("negatives.ratio", "must be >= 1");
  for (double lr : c.lambda_reg) {
    if (!(lr >= 0.0) || !std::isfinite(lr)) {
      p.Fail("sweep.lambda_reg", "values must be finite and >= 0");
    } else if (c.trainer == TrainerKind::kDcd && lr <= 0.0) {
      p.Fail("sweep.lambda_reg",
             "dcd needs lambda_reg > 0 (use e.g. 1e-3 for a near-zero run)");
    }
  }
  for (std::size_t d : c.dim) {
    if (d < 1) p.Fail("sweep.dim", "values must be >= 1");
  }
  for (int t : c.epochs) {
    if (t < 0) p.Fail("sweep.epochs", "values must be >= 0");
  }
  if (c.trainer == TrainerKind::kSgd) {
    check("sgd", [&] { c.sgd.Validate(); });
  } else {
    check("dcd", [&] {
      DcdConfig d = c.dcd;
      d.lambda_reg = 1.0;
      d.Validate();
    });
  }
  if (!(c.init_lo < c.init_hi)) p.Fail("init", "lo must be < hi");
  if (c.eval_every < 1) p.Fail("eval.every", "must be >= 1");
  if (c.theory.enabled) {
    if (c.theory.draws < 1) p.Fail("eval.theory.draws", "must be >= 1");
    if (!(c.theory.loss_bound > 0.0)) {
      p.Fail("eval.theory.loss_bound", "must be > 0");
    }
    if (!(c.theory.delta > 0.0 && c.theory.delta < 1.0)) {
      p.Fail("eval.theory.delta", "must be in (0, 1)");
    }
  }
  if (c.threads < 1) p.Fail("threads", "must be >= 1");
  if (c.output.empty()) p.Fail("output", "must not be empty");

  if (!p.errors().empty()) {
    std::string msg = "invalid config:";
    for (const auto& e : p.errors()) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return c;
}

ExperimentConfig LoadExperimentConfig(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return ParseExperimentConfig(j);
}

ordered_json ToJson(const ExperimentConfig& c) {
  ordered_json j;
  ordered_json g;
  if (c.graph.path) {
    g["path"] = c.graph.path->string();
    g["mode"] = ToString(c.graph.mode);
    g["symmetrize"] = c.graph.symmetrize;
  } else {
    const GeneratorConfig& gen = c.graph.generator;
    g["generator"] = ToString(gen.kind);
    g["n"] = gen.n;
    switch (gen.kind) {
      case GeneratorKind::kErdosRenyi:
        g["expected_edges"] = gen.expected_edges;
        break;
      case GeneratorKind::kDRegular:
        g["degree"] = gen.degree;
        break;
      case GeneratorKind::kSbm:
        g["blocks"] = gen.blocks;
        if (c.graph.avg_degree) {
          g["avg_degree"] = *c.graph.avg_degree;
          g["intra_fraction"] = c.graph.intra_fraction;
        } else {
          g["p_in"] = gen.p_in;
          g["p_out"] = gen.p_out;
        }
        break;
    }
  }
  if (c.graph.seed) g["seed"] = *c.graph.seed;
  j["graph"] = g;
  j["split"] = {{"ratio", c.split_ratio}};
  j["negatives"] = {{"ratio", c.negative_ratio}};
  j["trainer"] = ToString(c.trainer);
  ordered_json sgd;
  sgd["lambda_pos"] = c.sgd.lambda_pos;
  sgd["lambda_neg"] = c.sgd.lambda_neg;
  sgd["kappa"] = c.sgd.kappa ? ordered_json(*c.sgd.kappa) : ordered_json();
  sgd["lr_c"] = c.sgd.lr_c;
  sgd["clock"] = ToString(c.sgd.clock);
  sgd["clip"] = c.sgd.clip ? ordered_json(*c.sgd.clip) : ordered_json();
  sgd["resample_negatives"] = c.sgd.resample_negatives;
  j["sgd"] = sgd;
  j["dcd"] = {{"lambda_pos", c.dcd.lambda_pos},
              {"lambda_neg", c.dcd.lambda_neg},
              {"inner_shuffle", c.dcd.inner_shuffle},
              {"kkt_tol", c.dcd.kkt_tol},
              {"max_inner_passes", c.dcd.max_inner_passes}};
  j["init"] = {{"lo", c.init_lo}, {"hi", c.init_hi}};
  j["sweep"] = {
      {"lambda_reg", c.lambda_reg}, {"dim", c.dim}, {"epochs", c.epochs}};
  ordered_json eval = {{"every", c.eval_every},
                       {"train_ap", c.eval_train_ap},
                       {"macro_f1", c.eval_macro_f1}};
  if (c.theory.enabled) {
    eval["theory"] = {{"enabled", true},
                      {"draws", c.theory.draws},
                      {"loss_bound", c.theory.loss_bound},
                      {"delta", c.theory.delta},
                      {"symmetric", c.theory.symmetric}};
  }
  j["eval"] = eval;
  j["output"] = c.output.string();
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["decline_threshold"] = c.decline_threshold;
  return j;
}

// ---------------------------------------------------------------------------

DatasetSeeds DeriveDatasetSeeds(std::uint64_t master) {
  DatasetSeeds s;
  s.graph = DeriveSeed(master, {0x67});
  s.split = DeriveSeed(master, {0x73});
  s.train_negatives = DeriveSeed(master, {0x6e, 0});
  s.test_negatives = DeriveSeed(master, {0x6e, 1});
  s.validation_negatives = DeriveSeed(master, {0x6e, 2});
  s.labels = DeriveSeed(master, {0x6c});
  return s;
}

Graph LoadOrGenerate(const GraphSource& source, std::uint64_t graph_seed) {
  if (source.path) {
    LoadOptions opts;
    opts.symmetrize = source.symmetrize;
    return LoadEdgeList(*source.path, source.mode, opts);
  }
  GeneratorConfig gen = source.generator;
  gen.seed = source.seed.value_or(graph_seed);
  if (gen.kind == GeneratorKind::kSbm && source.avg_degree) {
    std::tie(gen.p_in, gen.p_out) = SbmProbabilitiesForDegree(
        gen.n, gen.blocks, *source.avg_degree, source.intra_fraction);
  }
  return Generate(gen);
}

Dataset PrepareDataset(const ExperimentConfig& config) {
  const DatasetSeeds seeds = DeriveDatasetSeeds(config.seed);
  Dataset d;
  d.graph = LoadOrGenerate(config.graph, seeds.graph);
  const Split split = SplitEdges(d.graph, config.split_ratio, seeds.split);
  NegativeSamplingOptions neg;
  neg.ratio = config.negative_ratio;
  neg.seed = seeds.train_negatives;
  d.train = SampleNegatives(d.graph, split.train, neg);
  neg.seed = seeds.test_negatives;
  d.test = SampleNegatives(d.graph, split.test, neg);
  if (!split.validation.empty()) {
    neg.seed = seeds.validation_negatives;
    d.validation = SampleNegatives(d.graph, split.validation, neg);
  }
  if (!config.graph.path &&
      config.graph.generator.kind == GeneratorKind::kSbm) {
    const std::size_t k = config.graph.generator.blocks;
    d.num_classes = static_cast<int>(k);
    d.labels.resize(d.graph.n_left());
    for (VertexId v = 0; v < d.labels.size(); ++v) {
      d.labels[v] = static_cast<int>(SbmBlock(v, k));
    }
  }
  return d;
}

std::vector<CellSpec> ExpandCells(const ExperimentConfig& config) {
  std::vector<CellSpec> cells;
  for (double lr : config.lambda_reg) {
    for (std::size_t dim : config.dim) {
      for (int epochs : config.epochs) {
        CellSpec c;
        c.lambda_reg = lr;
        c.dim = dim;
        c.epochs = epochs;
        c.name = "lr" + FormatReal(lr) + "_d" + std::to_string(dim) + "_t" +
                 std::to_string(epochs);
        c.seed = DeriveSeed(
            config.seed, {0x63656c6cULL, std::bit_cast<std::uint64_t>(lr), dim,
                          static_cast<std::uint64_t>(epochs)});
        c.init_seed = DeriveSeed(c.seed, {1});
        c.order_seed = DeriveSeed(c.seed, {2});
        c.eval_seed = DeriveSeed(c.seed, {3});
        cells.push_back(c);
      }
    }
  }
  return cells;
}

namespace {

void HashTrace(Fnv1a& h, const TrainTrace& trace) {
  for (const EpochRecord& r : trace.records) {
    h.U64(static_cast<std::uint64_t>(r.epoch));
    for (double v : {r.avg_norm, r.avg_grad_norm, r.loss, r.train_ap, r.test_ap,
                     r.macro_f1}) {
      h.F64(v);
    }
  }
}

ordered_json NormJson(const NormStats& s) {
  return {{"count", s.count},
          {"avg_norm", s.avg_norm},
          {"avg_sq_norm", s.avg_sq_norm},
          {"max_norm", s.max_norm},
          {"total_sq_norm", s.total_sq_norm}};
}

ordered_json CellJson(const CellSpec& c) {
  return {{"name", c.name},
          {"lambda_reg", c.lambda_reg},
          {"dim", c.dim},
          {"epochs", c.epochs},
          {"seed", c.seed},
          {"init_seed", c.init_seed},
          {"order_seed", c.order_seed},
          {"eval_seed", c.eval_seed}};
}

CellOutcome RunCellWithStore(const ExperimentConfig& config,
                             const Dataset& data, const CellSpec& cell,
                             EmbeddingStore& store) {
  const Graph& g = data.graph;
  store = InitUniform(g.mode(), g.n_left(), g.n_right(), cell.dim,
                      config.init_lo, config.init_hi, cell.init_seed);
  std::optional<LabelTask> task;
  if (config.eval_macro_f1 && !data.labels.empty()) {
    task = MakeLabelTask(data.labels, data.num_classes, 0.5,
                         DeriveSeed(cell.eval_seed, {1}));
  }
  auto hook = [&](int epoch, const EmbeddingStore& s, EpochRecord& rec) {
    if (epoch % config.eval_every != 0 && epoch != cell.epochs) return;
    rec.test_ap = LinkPredictionAp(s, data.test, cell.eval_seed).value;
    if (config.eval_train_ap) {
      rec.train_ap = LinkPredictionAp(s, data.train, cell.eval_seed).value;
    }
    if (task) rec.macro_f1 = EvaluateMacroF1(s, *task);
  };

  CellOutcome out;
  ordered_json metrics;
  metrics["cell"] = CellJson(cell);
  metrics["trainer"] = ToString(config.trainer);
  if (config.trainer == TrainerKind::kSgd) {
    SgdConfig sgd = config.sgd;
    sgd.lambda_reg = cell.lambda_reg;
    sgd.epochs = cell.epochs;
    sgd.order_seed = cell.order_seed;
    sgd.negative_ratio = config.negative_ratio;
    sgd.resample_seed = DeriveSeed(cell.seed, {4});
    sgd.threads = config.threads;
    out.trace = TrainSgd(g, data.train, store, sgd, hook);
  } else {
    DcdConfig dcd = config.dcd;
    dcd.lambda_reg = cell.lambda_reg;
    dcd.sweeps = cell.epochs;
    dcd.order_seed = cell.order_seed;
    dcd.threads = config.threads;
    DcdResult r = TrainDcd(data.train, store, dcd, hook);
    out.trace = std::move(r.trace);
    metrics["dcd"] = {
        {"mean_kkt", r.diagnostics.mean_kkt},
        {"max_kkt", r.diagnostics.max_kkt},
        {"max_primal_dual_gap", r.diagnostics.max_primal_dual_gap},
        {"skipped_zero", r.diagnostics.skipped_zero},
        {"duals_feasible", r.diagnostics.duals_feasible}};
  }

  const ApResult test_ap = LinkPredictionAp(store, data.test, cell.eval_seed);
  metrics["test_ap"] = ApToJson(test_ap);
  metrics["train_ap"] =
      ApToJson(LinkPredictionAp(store, data.train, cell.eval_seed));
  double peak = -1.0;
  int peak_epoch = 0;
  for (const EpochRecord& r : out.trace.records) {
    if (!std::isnan(r.test_ap) && r.test_ap > peak) {
      peak = r.test_ap;
      peak_epoch = r.epoch;
    }
  }
  if (peak_epoch > 0) {
    metrics["peak_test_ap"] = peak;
    metrics["peak_epoch"] = peak_epoch;
  }
  const NormReport norms = ComputeNormReport(store);
  metrics["norms"] = {{"left", NormJson(norms.left)},
                      {"right", NormJson(norms.right)},
                      {"combined", NormJson(norms.combined)}};
  if (task) metrics["macro_f1"] = EvaluateMacroF1(store, *task);
  if (config.theory.enabled) {
    BoundOptions b;
    b.loss_bound = config.theory.loss_bound;
    b.delta = config.theory.delta;
    b.spectral.n_draws = config.theory.draws;
    b.spectral.seed = DeriveSeed(cell.seed, {5});
    b.spectral.symmetric = config.theory.symmetric;
    metrics["theory"] =
        ToJson(ComputeBoundReport(store, data.train, data.test, b));
  }

  Fnv1a h;
  HashTrace(h, out.trace);
  for (double v : store.left_data()) h.F64(v);
  if (!store.shared()) {
    for (double v : store.right_data()) h.F64(v);
  }
  h.Text(metrics.dump());
  out.output_hash = h.hex();
  metrics["output_hash"] = out.output_hash;
  out.metrics = std::move(metrics);
  return out;
}

}  // namespace

CellOutcome RunCell(const ExperimentConfig& config, const Dataset& data,
                    const CellSpec& cell) {
  EmbeddingStore store;
  return RunCellWithStore(config, data, cell, store);
}

ordered_json RunExperiment(const ExperimentConfig& config, std::ostream& log) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const DatasetSeeds seeds = DeriveDatasetSeeds(config.seed);
  const Dataset data = PrepareDataset(config);
  const std::vector<CellSpec> cells = ExpandCells(config);
  fs::create_directories(config.output / "cells");

  ordered_json manifest;
  manifest["tool"] = "lge";
  manifest["version"] = kVersion;
  manifest["config"] = ToJson(config);
  manifest["dataset"] = {
      {"mode", ToString(data.graph.mode())},
      {"n_left", data.graph.n_left()},
      {"n_right", data.graph.n_right()},
      {"edges", data.graph.num_edges()},
      {"train",
       {{"pos", data.train.num_positive()},
        {"neg", data.train.num_negative()}}},
      {"test",
       {{"pos", data.test.num_positive()}, {"neg", data.test.num_negative()}}},
      {"seeds",
       {{"graph", config.graph.seed.value_or(seeds.graph)},
        {"split", seeds.split},
        {"train_negatives", seeds.train_negatives},
        {"test_negatives", seeds.test_negatives}}}};
  manifest["cells"] = ordered_json::array();
  for (const CellSpec& c : cells) {
    ordered_json entry = CellJson(c);
    entry["dir"] = "cells/" + c.name;
    entry["status"] = "pending";
    manifest["cells"].push_back(entry);
  }
  auto save_manifest = [&] {
    const fs::path tmp = config.output / "manifest.json.tmp";
    WriteFile(tmp, manifest.dump(2) + "\n");
    fs::rename(tmp, config.output / "manifest.json");
  };

  Fnv1a total;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const CellSpec& cell = cells[i];
    ordered_json& entry = manifest["cells"][i];
    const fs::path dir = config.output / "cells" / cell.name;
    if (fs::exists(dir / "DONE")) {
      const auto metrics = json::parse(ReadFile(dir / "metrics.json"));
      entry["status"] = "done";
      entry["resumed"] = true;
      entry["output_hash"] = metrics.at("output_hash");
      entry["wall_seconds"] = 0.0;
      total.Text(metrics.at("output_hash").get<std::string>());
      log << "cell " << cell.name << ": already done, skipped\n";
      continue;
    }
    entry["status"] = "running";
    save_manifest();
    const auto cell_start = Clock::now();
    try {
      fs::create_directories(dir);
      EmbeddingStore store;
      const CellOutcome out = RunCellWithStore(config, data, cell, store);
      {
        std::ofstream csv(dir / "trace.csv");
        WriteTraceCsv(csv, out.trace);
        std::ofstream jsonl(dir / "trace.jsonl");
        WriteTraceJsonl(jsonl, out.trace);
      }
      SaveEmbeddings(dir / "embeddings.txt", store);
      const ordered_json emb_meta = {{"seed", cell.init_seed},
                                     {"epoch", cell.epochs},
                                     {"trainer", ToString(config.trainer)},
                                     {"dim", cell.dim},
                                     {"lambda_reg", cell.lambda_reg}};
      WriteFile(dir / "embeddings.json", emb_meta.dump(2) + "\n");
      ordered_json sidecar = CellJson(cell);
      sidecar["trainer"] = ToString(config.trainer);
      sidecar["config"] = ToJson(config);
      WriteFile(dir / "cell.json", sidecar.dump(2) + "\n");
      WriteFile(dir / "metrics.json", out.metrics.dump(2) + "\n");
      WriteFile(dir / "DONE", out.output_hash + "\n");
      entry["status"] = "done";
      entry["output_hash"] = out.output_hash;
      total.Text(out.output_hash);
      log << "cell " << cell.name << ": final test AP "
          << out.metrics["test_ap"]["value"].get<double>() << "\n";
    } catch (const std::exception& e) {
      entry["status"] = "failed";
      entry["error"] = e.what();
      entry["wall_seconds"] =
          std::chrono::duration<double>(Clock::now() - cell_start).count();
      save_manifest();
      throw Error("cell " + cell.name + " failed: " + e.what());
    }
    entry["wall_seconds"] =
        std::chrono::duration<double>(Clock::now() - cell_start).count();
  }
  manifest["output_hash"] = total.hex();
  manifest["wall_seconds"] =
      std::chrono::duration<double>(Clock::now() - start).count();
  save_manifest();
  return manifest;
}

// ---------------------------------------------------------------------------

Report BuildReport(const fs::path& dir) {
  const fs::path path = dir / "manifest.json";
  if (!fs::exists(path)) {
    throw ConfigError("report: no manifest.json in " + dir.string());
  }
  json manifest;
  try {
    manifest = json::parse(ReadFile(path));
  } catch (const json::exception& e) {
    throw ConfigError("report: corrupt manifest " + path.string() + ": " +
                      e.what());
  }
  Report report;
  try {
    const double threshold =
        manifest.at("config").value("decline_threshold", 0.01);
    report.output_hash = manifest.value("output_hash", "");
    for (const json& entry : manifest.at("cells")) {
      if (entry.at("status") != "done") continue;
      ReportRow row;
      row.cell = entry.at("name").get<std::string>();
      row.lambda_reg = entry.at("lambda_reg").get<double>();
      row.dim = entry.at("dim").get<std::size_t>();
      row.epochs = entry.at("epochs").get<int>();
      row.low_dim = row.dim <= 10;
      const fs::path cell_dir = dir / entry.at("dir").get<std::string>();
      std::ifstream csv(cell_dir / "trace.csv");
      if (!csv) throw ConfigError("report: missing trace for " + row.cell);
      const TrainTrace trace = ReadTraceCsv(csv);
      row.final_test_ap = kMissing;
      row.peak_test_ap = -1.0;
      int last_epoch = 0;
      for (const EpochRecord& r : trace.records) {
        if (std::isnan(r.test_ap)) continue;
        row.final_test_ap = r.test_ap;
        last_epoch = r.epoch;
        if (r.test_ap > row.peak_test_ap) {
          row.peak_test_ap = r.test_ap;
          row.peak_epoch = r.epoch;
        }
      }
      if (row.peak_epoch == 0) row.peak_test_ap = kMissing;
      if (!trace.records.empty()) {
        row.final_avg_norm = trace.records.back().avg_norm;
      }
      row.peak_then_decline = row.peak_epoch > 0 &&
                              row.peak_epoch < last_epoch &&
                              row.peak_test_ap - row.final_test_ap >= threshold;
      const json metrics = json::parse(ReadFile(cell_dir / "metrics.json"));
      if (const auto it = metrics.find("theory"); it != metrics.end()) {
        row.rademacher_term = it->at("rademacher_term").get<double>();
        row.confidence_term = it->at("confidence_term").get<double>();
        row.rhs_gap = it->at("rhs_gap").get<double>();
        row.observed_gap = it->at("observed_gap").get<double>();
      }
      report.rows.push_back(row);
    }
  } catch (const json::exception& e) {
    throw ConfigError("report: corrupt manifest or cell metrics in " +
                      dir.string() + ": " + e.what());
  }
  return report;
}

void WriteReportTable(std::ostream& out, const Report& report) {
  char line[256];
  std::snprintf(line, sizeof line,
                "%-24s %9s %5s %6s %8s %8s %5s %9s %10s %10s  %s\n", "cell",
                "lambda_r", "D", "epochs", "final_ap", "peak_ap", "@", "norm",
                "rhs_gap", "obs_gap", "flags");
  out << line;
  for (const ReportRow& r : report.rows) {
    std::string flags;
    if (r.peak_then_decline) flags += "peak-then-decline ";
    if (r.low_dim) flags += "low-dim";
    std::snprintf(line, sizeof line,
                  "%-24s %9.4g %5zu %6d %8.4f %8.4f %5d %9.4f %10.4g %10.4g  "
                  "%s\n",
                  r.cell.c_str(), r.lambda_reg, r.dim, r.epochs,
                  r.final_test_ap, r.peak_test_ap, r.peak_epoch,
                  r.final_avg_norm, r.rhs_gap, r.observed_gap, flags.c_str());
    out << line;
  }
}

ordered_json ToJson(const Report& report) {
  auto num = [](double v) {
    return std::isnan(v) ? ordered_json() : ordered_json(v);
  };
  ordered_json rows = ordered_json::array();
  for (const ReportRow& r : report.rows) {
    rows.push_back({{"cell", r.cell},
                    {"lambda_reg", r.lambda_reg},
                    {"dim", r.dim},
                    {"epochs", r.epochs},
                    {"final_test_ap", num(r.final_test_ap)},
                    {"peak_test_ap", num(r.peak_test_ap)},
                    {"peak_epoch", r.peak_epoch},
                    {"final_avg_norm", r.final_avg_norm},
                    {"rademacher_term", num(r.rademacher_term)},
                    {"confidence_term", num(r.confidence_term)},
                    {"rhs_gap", num(r.rhs_gap)},
                    {"observed_gap", num(r.observed_gap)},
                    {"peak_then_decline", r.peak_then_decline},
                    {"low_dim", r.low_dim}});
  }
  return {{"rows", rows}, {"output_hash", report.output_hash}};
}

}  // namespace lge
