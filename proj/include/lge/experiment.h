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

// Config-driven sweeps: one training run per (lambda_reg, dim, epochs)
// cell, each writing its trace, embeddings and metrics under the output
// directory, plus a manifest that records the resolved config and a hash of
// every numeric output.

#ifndef LGE_EXPERIMENT_H_
#define LGE_EXPERIMENT_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lge/dcd.h"
#include "lge/graph.h"
#include "lge/sgd.h"
#include "lge/theory.h"

namespace lge {

inline constexpr const char* kVersion = "0.1.0";

struct GraphSource {
  std::optional<std::filesystem::path> path;
  GraphMode mode = GraphMode::kHomogeneous;
  bool symmetrize = false;
  // Used when `path` is empty. For sbm, p_in/p_out may instead be derived
  // from avg_degree and intra_fraction.
  GeneratorConfig generator;
  // Overrides the graph seed derived from the master seed.
  std::optional<std::uint64_t> seed;
  std::optional<double> avg_degree;
  double intra_fraction = 0.95;
};

struct TheoryEval {
  bool enabled = false;
  std::size_t draws = 10;
  double loss_bound = 4.0;
  double delta = 0.05;
  bool symmetric = false;
};

struct ExperimentConfig {
  GraphSource graph;
  std::array<double, 3> split_ratio{0.5, 0.25, 0.25};
  std::size_t negative_ratio = 4;
  TrainerKind trainer = TrainerKind::kSgd;
  SgdConfig sgd;  // lambda_reg, epochs and seeds come from the sweep
  DcdConfig dcd;
  double init_lo = -0.1;
  double init_hi = 0.1;
  std::vector<double> lambda_reg{0.0};
  std::vector<std::size_t> dim{100};
  std::vector<int> epochs{50};
  int eval_every = 1;
  bool eval_train_ap = true;
  bool eval_macro_f1 = false;
  TheoryEval theory;
  std::filesystem::path output = "out";
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  // Peak minus final test AP at or above this marks a peak-then-decline cell.
  double decline_threshold = 0.01;
};

// Parses and validates; every problem found is listed in the ConfigError
// message, one per line, prefixed by its field path.
ExperimentConfig ParseExperimentConfig(const nlohmann::json& j);
ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path);
nlohmann::ordered_json ToJson(const ExperimentConfig& config);

// Seeds shared by all cells.
struct DatasetSeeds {
  std::uint64_t graph = 0;
  std::uint64_t split = 0;
  std::uint64_t train_negatives = 0;
  std::uint64_t test_negatives = 0;
  std::uint64_t validation_negatives = 0;
  std::uint64_t labels = 0;
};
DatasetSeeds DeriveDatasetSeeds(std::uint64_t master);

struct Dataset {
  Graph graph;
  LabeledEdgeSet train;  // positives followed by sampled negatives
  LabeledEdgeSet validation;
  LabeledEdgeSet test;
  // Block ids when the graph came from the sbm generator.
  std::vector<int> labels;
  int num_classes = 0;
};

Graph LoadOrGenerate(const GraphSource& source, std::uint64_t graph_seed);
Dataset PrepareDataset(const ExperimentConfig& config);

struct CellSpec {
  double lambda_reg = 0.0;
  std::size_t dim = 0;
  int epochs = 0;
  std::string name;
  // Derived from the master seed and the axis values only, so adding a
  // value to an axis leaves the other cells' randomness unchanged.
  std::uint64_t seed = 0;
  std::uint64_t init_seed = 0;
  std::uint64_t order_seed = 0;
  std::uint64_t eval_seed = 0;
};

std::vector<CellSpec> ExpandCells(const ExperimentConfig& config);

struct CellOutcome {
  TrainTrace trace;
  nlohmann::ordered_json metrics;
  std::string output_hash;
};

// Trains one cell in memory and computes its metrics.
CellOutcome RunCell(const ExperimentConfig& config, const Dataset& data,
                    const CellSpec& cell);

// Runs every cell, skipping cells whose done marker exists. Writes the
// manifest after every cell. Throws ConfigError for invalid input and Error
// naming the cell for a failed run; finished cells are kept either way.
nlohmann::ordered_json RunExperiment(const ExperimentConfig& config,
                                     std::ostream& log);

struct ReportRow {
  std::string cell;
  double lambda_reg = 0.0;
  std::size_t dim = 0;
  int epochs = 0;
  double final_test_ap = 0.0;
  double peak_test_ap = 0.0;
  int peak_epoch = 0;
  double final_avg_norm = 0.0;
  // Bound terms; NaN when the cell ran without theory evaluation.
  double rademacher_term = kMissing;
  double confidence_term = kMissing;
  double rhs_gap = kMissing;
  double observed_gap = kMissing;
  bool peak_then_decline = false;
  bool low_dim = false;  // dim <= 10
};

struct Report {
  std::vector<ReportRow> rows;
  std::string output_hash;
};

Report BuildReport(const std::filesystem::path& dir);
void WriteReportTable(std::ostream& out, const Report& report);
nlohmann::ordered_json ToJson(const Report& report);

}  // namespace lge

#endif  // LGE_EXPERIMENT_H_
