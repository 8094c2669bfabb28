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

// Sparse simple graphs, edge-list IO, synthetic generators, train/valid/test
// splitting and negative sampling.

#ifndef LGE_GRAPH_H_
#define LGE_GRAPH_H_

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lge {

using VertexId = std::uint32_t;

enum class GraphMode { kHomogeneous, kBipartite };

std::string_view ToString(GraphMode mode);
GraphMode ParseGraphMode(std::string_view text);

// In homogeneous mode edges are unordered and stored with a < b. In
// bipartite mode `a` indexes the left partition and `b` the right one.
struct Edge {
  VertexId a = 0;
  VertexId b = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Immutable simple graph with sorted adjacency lists.
class Graph {
 public:
  Graph() = default;

  // Canonicalizes, sorts and deduplicates `edges`. Throws ConfigError on a
  // self-loop (homogeneous) or an id outside the declared vertex range.
  static Graph FromEdges(GraphMode mode, std::size_t n_left,
                         std::size_t n_right, std::vector<Edge> edges);
  static Graph Homogeneous(std::size_t n, std::vector<Edge> edges) {
    return FromEdges(GraphMode::kHomogeneous, n, n, std::move(edges));
  }

  GraphMode mode() const { return mode_; }
  bool homogeneous() const { return mode_ == GraphMode::kHomogeneous; }
  std::size_t n_left() const { return n_left_; }
  std::size_t n_right() const { return n_right_; }
  std::size_t num_edges() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }

  // Neighbors of a left vertex (all neighbors in homogeneous mode).
  std::span<const VertexId> neighbors(VertexId v) const;
  // Neighbors of a right vertex; same as neighbors() in homogeneous mode.
  std::span<const VertexId> right_neighbors(VertexId v) const;
  std::size_t degree(VertexId v) const { return neighbors(v).size(); }

  // Order-insensitive in homogeneous mode.
  bool HasEdge(VertexId a, VertexId b) const;

  // Number of vertex pairs that are valid negative candidates, i.e. not
  // self-pairs and not edges.
  std::uint64_t NumNonEdges() const;

 private:
  GraphMode mode_ = GraphMode::kHomogeneous;
  std::size_t n_left_ = 0;
  std::size_t n_right_ = 0;
  std::vector<Edge> edges_;
  // CSR adjacency. For homogeneous graphs only the left arrays are used.
  std::vector<std::size_t> left_offsets_{0};
  std::vector<VertexId> left_adj_;
  std::vector<std::size_t> right_offsets_{0};
  std::vector<VertexId> right_adj_;
};

struct LoadOptions {
  // Accept files that declare themselves directed ("# directed") and treat
  // each arc as an undirected edge.
  bool symmetrize = false;
};

// Parses a whitespace-separated edge list. '#' starts a comment line.
// Vertex count per side is 1 + the largest id seen on that side.
Graph ParseEdgeList(std::istream& in, GraphMode mode,
                    const LoadOptions& options = {});
Graph LoadEdgeList(const std::filesystem::path& path, GraphMode mode,
                   const LoadOptions& options = {});
// Pairs in file order, without deduplication; for persisted sample lists.
std::vector<Edge> ReadEdgePairs(const std::filesystem::path& path,
                                GraphMode mode);

void WriteEdgeList(std::ostream& out, std::span<const Edge> edges);
// Writes a "# vertices" header first so isolated high ids survive a reload.
void SaveGraph(const std::filesystem::path& path, const Graph& g);
void SaveEdgeList(const std::filesystem::path& path,
                  std::span<const Edge> edges);

// ---------------------------------------------------------------------------
// Synthetic generators.

enum class GeneratorKind { kErdosRenyi, kDRegular, kSbm };

std::string_view ToString(GeneratorKind kind);
GeneratorKind ParseGeneratorKind(std::string_view text);

struct GeneratorConfig {
  GeneratorKind kind = GeneratorKind::kErdosRenyi;
  std::size_t n = 0;
  double expected_edges = 0.0;  // erdos_renyi
  std::size_t degree = 0;       // d_regular
  std::size_t blocks = 1;       // sbm
  double p_in = 0.0;            // sbm
  double p_out = 0.0;           // sbm
  std::uint64_t seed = 0;
  // Full restarts allowed for the d-regular pairing model.
  std::size_t max_restarts = 100000;

  void Validate() const;
};

Graph Generate(const GeneratorConfig& config);

// Block of vertex v in an SBM graph generated with `blocks` blocks.
inline std::size_t SbmBlock(VertexId v, std::size_t blocks) {
  return v % blocks;
}

// p_in/p_out pair giving expected average degree `avg_degree` on an SBM of
// n vertices in k round-robin blocks, with a fraction `intra_fraction` of
// each vertex's expected edges inside its own block.
std::pair<double, double> SbmProbabilitiesForDegree(std::size_t n,
                                                    std::size_t k,
                                                    double avg_degree,
                                                    double intra_fraction);

// ---------------------------------------------------------------------------
// Labeled samples.

struct Sample {
  VertexId a = 0;
  VertexId b = 0;
  int y = +1;  // +1 or -1
  friend bool operator==(const Sample&, const Sample&) = default;
};

// The signed multiset of positive and negative edge samples.
struct LabeledEdgeSet {
  GraphMode mode = GraphMode::kHomogeneous;
  std::vector<Sample> samples;

  std::size_t num_positive() const;
  std::size_t num_negative() const;
  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }

  static LabeledEdgeSet Positives(GraphMode mode, std::span<const Edge> edges);
  std::vector<Edge> EdgesWithLabel(int y) const;
};

struct Split {
  LabeledEdgeSet train;
  LabeledEdgeSet validation;
  LabeledEdgeSet test;
  std::array<double, 3> ratio{0.5, 0.25, 0.25};
};

// Part sizes for `total` items under `ratio` by the largest-remainder rule.
// Ties go to the lower part index.
std::array<std::size_t, 3> LargestRemainderSizes(
    std::size_t total, const std::array<double, 3>& ratio);

// Random partition of g's edges into positive-only train/valid/test sets.
Split SplitEdges(const Graph& g, const std::array<double, 3>& ratio,
                 std::uint64_t seed);

struct NegativeSamplingOptions {
  std::size_t ratio = 4;
  bool reject_observed = true;
  std::uint64_t seed = 0;
  // Draws allowed per requested negative before giving up.
  std::size_t max_attempts_per_sample = 1000;
};

// Returns `positives` followed by ratio * |positives| uniform pairs labeled
// -1. Homogeneous pairs are stored with a < b.
LabeledEdgeSet SampleNegatives(const Graph& g, const LabeledEdgeSet& positives,
                               const NegativeSamplingOptions& options);

}  // namespace lge

#endif  // LGE_GRAPH_H_
