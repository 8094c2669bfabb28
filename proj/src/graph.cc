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

#include "lge/graph.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include "lge/error.h"
#include "lge/random.h"

namespace lge {
namespace {

constexpr std::uint64_t kMaxVertexId = std::numeric_limits<VertexId>::max() - 1;

void BuildCsr(std::size_t n, std::span<const Edge> edges, bool use_a_as_key,
              bool symmetric, std::vector<std::size_t>& offsets,
              std::vector<VertexId>& adj) {
  offsets.assign(n + 1, 0);
  for (const Edge& e : edges) {
    ++offsets[(use_a_as_key ? e.a : e.b) + 1];
    if (symmetric) ++offsets[e.b + 1];
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  adj.assign(offsets[n], 0);
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  for (const Edge& e : edges) {
    if (use_a_as_key) {
      adj[cursor[e.a]++] = e.b;
    } else {
      adj[cursor[e.b]++] = e.a;
    }
    if (symmetric) adj[cursor[e.b]++] = e.a;
  }
  for (std::size_t v = 0; v < n; ++v) {
    std::sort(adj.begin() + offsets[v], adj.begin() + offsets[v + 1]);
  }
}

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string_view ToString(GraphMode mode) {
  return mode == GraphMode::kHomogeneous ? "homogeneous" : "bipartite";
}

GraphMode ParseGraphMode(std::string_view text) {
  if (text == "homogeneous") return GraphMode::kHomogeneous;
  if (text == "bipartite") return GraphMode::kBipartite;
  throw ConfigError("unknown graph mode '" + std::string(text) + "'");
}

Graph Graph::FromEdges(GraphMode mode, std::size_t n_left, std::size_t n_right,
                       std::vector<Edge> edges) {
  Graph g;
  g.mode_ = mode;
  g.n_left_ = n_left;
  g.n_right_ = mode == GraphMode::kHomogeneous ? n_left : n_right;
  for (Edge& e : edges) {
    if (mode == GraphMode::kHomogeneous) {
      if (e.a == e.b) {
        throw ConfigError("self-loop on vertex " + std::to_string(e.a));
      }
      if (e.a > e.b) std::swap(e.a, e.b);
    }
    if (e.a >= g.n_left_ || e.b >= g.n_right_) {
      throw ConfigError("edge (" + std::to_string(e.a) + ", " +
                        std::to_string(e.b) + ") outside vertex range");
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  g.edges_ = std::move(edges);
  if (mode == GraphMode::kHomogeneous) {
    BuildCsr(g.n_left_, g.edges_, true, true, g.left_offsets_, g.left_adj_);
  } else {
    BuildCsr(g.n_left_, g.edges_, true, false, g.left_offsets_, g.left_adj_);
    BuildCsr(g.n_right_, g.edges_, false, false, g.right_offsets_,
             g.right_adj_);
  }
  return g;
}

std::span<const VertexId> Graph::neighbors(VertexId v) const {
  return std::span<const VertexId>(left_adj_).subspan(
      left_offsets_[v], left_offsets_[v + 1] - left_offsets_[v]);
}

std::span<const VertexId> Graph::right_neighbors(VertexId v) const {
  if (homogeneous()) return neighbors(v);
  return std::span<const VertexId>(right_adj_)
      .subspan(right_offsets_[v], right_offsets_[v + 1] - right_offsets_[v]);
}

bool Graph::HasEdge(VertexId a, VertexId b) const {
  if (a >= n_left_ || b >= n_right_) return false;
  const auto nbrs = neighbors(a);
  return std::binary_search(nbrs.begin(), nbrs.end(), b);
}

std::uint64_t Graph::NumNonEdges() const {
  const std::uint64_t pairs =
      homogeneous() ? static_cast<std::uint64_t>(n_left_) *
                          (n_left_ == 0 ? 0 : n_left_ - 1) / 2
                    : static_cast<std::uint64_t>(n_left_) * n_right_;
  return pairs - edges_.size();
}

namespace {

struct ParsedPairs {
  std::vector<Edge> edges;
  std::size_t n_left = 0;
  std::size_t n_right = 0;
};

// Reads "a b" lines in file order. A "# vertices N" (or "# vertices NL NR"
// for bipartite files) comment raises the vertex counts above 1 + max id.
ParsedPairs ParsePairs(std::istream& in, GraphMode mode,
                       const LoadOptions& options) {
  ParsedPairs out;
  std::uint64_t max_left = 0, max_right = 0;
  bool any = false;
  std::uint64_t declared[2] = {0, 0};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = Trim(line);
    if (text.empty()) continue;
    if (text.front() == '#') {
      const std::string_view body = Trim(text.substr(1));
      if (body == "directed" && !options.symmetrize) {
        throw ParseError(
            "edge list is declared directed; pass symmetrize to load it as "
            "undirected",
            line_no);
      }
      if (body.starts_with("vertices")) {
        std::istringstream ss{std::string(body.substr(8))};
        if (!(ss >> declared[0])) {
          throw ParseError("malformed vertices header", line_no);
        }
        if (!(ss >> declared[1])) declared[1] = declared[0];
      }
      continue;
    }
    std::uint64_t ids[2];
    const char* p = text.data();
    const char* end = text.data() + text.size();
    for (int k = 0; k < 2; ++k) {
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
      auto [next, ec] = std::from_chars(p, end, ids[k]);
      if (ec == std::errc::result_out_of_range ||
          (ec == std::errc() && ids[k] > kMaxVertexId)) {
        throw ParseError("vertex id overflow", line_no);
      }
      if (ec != std::errc() || (next < end && *next != ' ' && *next != '\t')) {
        throw ParseError("malformed edge line '" + std::string(text) + "'",
                         line_no);
      }
      p = next;
    }
    while (p < end && (*p == ' ' || *p == '\t')) ++p;
    if (p != end) {
      throw ParseError("malformed edge line '" + std::string(text) + "'",
                       line_no);
    }
    if (mode == GraphMode::kHomogeneous && ids[0] == ids[1]) {
      throw ParseError("self-loop on vertex " + std::to_string(ids[0]),
                       line_no);
    }
    any = true;
    if (mode == GraphMode::kHomogeneous) {
      max_left = std::max({max_left, ids[0], ids[1]});
    } else {
      max_left = std::max(max_left, ids[0]);
      max_right = std::max(max_right, ids[1]);
    }
    out.edges.push_back(
        {static_cast<VertexId>(ids[0]), static_cast<VertexId>(ids[1])});
  }
  out.n_left = std::max<std::uint64_t>(any ? max_left + 1 : 0, declared[0]);
  out.n_right =
      mode == GraphMode::kHomogeneous
          ? out.n_left
          : std::max<std::uint64_t>(any ? max_right + 1 : 0, declared[1]);
  return out;
}

}  // namespace

Graph ParseEdgeList(std::istream& in, GraphMode mode,
                    const LoadOptions& options) {
  ParsedPairs parsed = ParsePairs(in, mode, options);
  return Graph::FromEdges(mode, parsed.n_left, parsed.n_right,
                          std::move(parsed.edges));
}

std::vector<Edge> ReadEdgePairs(const std::filesystem::path& path,
                                GraphMode mode) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open edge list " + path.string());
  LoadOptions opts;
  opts.symmetrize = true;
  return ParsePairs(in, mode, opts).edges;
}

Graph LoadEdgeList(const std::filesystem::path& path, GraphMode mode,
                   const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open edge list " + path.string());
  return ParseEdgeList(in, mode, options);
}

void WriteEdgeList(std::ostream& out, std::span<const Edge> edges) {
  for (const Edge& e : edges) out << e.a << '\t' << e.b << '\n';
}

void SaveEdgeList(const std::filesystem::path& path,
                  std::span<const Edge> edges) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  WriteEdgeList(out, edges);
}

void SaveGraph(const std::filesystem::path& path, const Graph& g) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "# vertices " << g.n_left();
  if (!g.homogeneous()) out << ' ' << g.n_right();
  out << '\n';
  WriteEdgeList(out, g.edges());
}

// ---------------------------------------------------------------------------

std::string_view ToString(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::kErdosRenyi:
      return "erdos_renyi";
    case GeneratorKind::kDRegular:
      return "d_regular";
    case GeneratorKind::kSbm:
      return "sbm";
  }
  return "unknown";
}

GeneratorKind ParseGeneratorKind(std::string_view text) {
  if (text == "erdos_renyi") return GeneratorKind::kErdosRenyi;
  if (text == "d_regular") return GeneratorKind::kDRegular;
  if (text == "sbm") return GeneratorKind::kSbm;
  throw ConfigError("unknown generator kind '" + std::string(text) + "'");
}

void GeneratorConfig::Validate() const {
  switch (kind) {
    case GeneratorKind::kErdosRenyi:
      if (!(expected_edges >= 0.0)) {
        throw ConfigError("erdos_renyi: expected edge count must be >= 0");
      }
      break;
    case GeneratorKind::kDRegular:
      if (degree >= n && n > 0) {
        throw ConfigError("d_regular: degree must be < n");
      }
      if ((n * degree) % 2 != 0) {
        throw ConfigError("d_regular: n*d must be even");
      }
      break;
    case GeneratorKind::kSbm:
      if (blocks == 0) throw ConfigError("sbm: block count must be >= 1");
      if (!(p_in >= 0.0 && p_in <= 1.0) || !(p_out >= 0.0 && p_out <= 1.0)) {
        throw ConfigError("sbm: probabilities must lie in [0, 1]");
      }
      break;
  }
}

namespace {

Graph GenerateErdosRenyi(const GeneratorConfig& c, Rng& rng) {
  const double pairs = 0.5 * static_cast<double>(c.n) *
                       (c.n == 0 ? 0.0 : static_cast<double>(c.n - 1));
  const double p =
      pairs > 0 ? std::clamp(c.expected_edges / pairs, 0.0, 1.0) : 0.0;
  std::vector<Edge> edges;
  if (p <= 0.0) return Graph::Homogeneous(c.n, {});
  if (p >= 1.0) {
    for (VertexId i = 0; i < c.n; ++i)
      for (VertexId j = i + 1; j < c.n; ++j) edges.push_back({i, j});
    return Graph::Homogeneous(c.n, std::move(edges));
  }
  // Geometric skipping over the lower triangle, visiting each pair at most
  // once; equivalent to an independent coin per pair.
  const double log_q = std::log1p(-p);
  std::int64_t v = 1, w = -1;
  const auto n = static_cast<std::int64_t>(c.n);
  while (v < n) {
    const double r = rng.Uniform01();
    w += 1 + static_cast<std::int64_t>(std::floor(std::log1p(-r) / log_q));
    while (w >= v && v < n) {
      w -= v;
      ++v;
    }
    if (v < n) {
      edges.push_back({static_cast<VertexId>(w), static_cast<VertexId>(v)});
    }
  }
  return Graph::Homogeneous(c.n, std::move(edges));
}

Graph GenerateDRegular(const GeneratorConfig& c, Rng& rng) {
  const std::size_t d = c.degree;
  std::vector<VertexId> stubs(c.n * d);
  for (std::size_t i = 0; i < stubs.size(); ++i) {
    stubs[i] = static_cast<VertexId>(i / d);
  }
  std::vector<Edge> edges;
  std::set<Edge> seen;
  for (std::size_t attempt = 0; attempt < c.max_restarts; ++attempt) {
    Shuffle(std::span<VertexId>(stubs), rng);
    edges.clear();
    seen.clear();
    bool ok = true;
    for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
      Edge e{std::min(stubs[i], stubs[i + 1]),
             std::max(stubs[i], stubs[i + 1])};
      if (e.a == e.b || !seen.insert(e).second) {
        ok = false;
        break;
      }
      edges.push_back(e);
    }
    if (ok) return Graph::Homogeneous(c.n, std::move(edges));
  }
  throw NumericalError("d_regular: pairing model failed after " +
                       std::to_string(c.max_restarts) + " restarts");
}

Graph GenerateSbm(const GeneratorConfig& c, Rng& rng) {
  std::vector<Edge> edges;
  for (VertexId i = 0; i < c.n; ++i) {
    for (VertexId j = i + 1; j < c.n; ++j) {
      const bool same = SbmBlock(i, c.blocks) == SbmBlock(j, c.blocks);
      if (rng.Bernoulli(same ? c.p_in : c.p_out)) edges.push_back({i, j});
    }
  }
  return Graph::Homogeneous(c.n, std::move(edges));
}

}  // namespace

Graph Generate(const GeneratorConfig& config) {
  config.Validate();
  Rng rng(config.seed);
  switch (config.kind) {
    case GeneratorKind::kErdosRenyi:
      return GenerateErdosRenyi(config, rng);
    case GeneratorKind::kDRegular:
      return GenerateDRegular(config, rng);
    case GeneratorKind::kSbm:
      return GenerateSbm(config, rng);
  }
  throw ConfigError("unknown generator kind");
}

std::pair<double, double> SbmProbabilitiesForDegree(std::size_t n,
                                                    std::size_t k,
                                                    double avg_degree,
                                                    double intra_fraction) {
  const double block = static_cast<double>(n) / static_cast<double>(k);
  const double intra_pairs = block - 1.0;
  const double inter_pairs = static_cast<double>(n) - block;
  const double p_in =
      intra_pairs > 0 ? avg_degree * intra_fraction / intra_pairs : 0.0;
  const double p_out =
      inter_pairs > 0 ? avg_degree * (1.0 - intra_fraction) / inter_pairs : 0.0;
  return {std::clamp(p_in, 0.0, 1.0), std::clamp(p_out, 0.0, 1.0)};
}

// ---------------------------------------------------------------------------

std::size_t LabeledEdgeSet::num_positive() const {
  return static_cast<std::size_t>(std::count_if(
      samples.begin(), samples.end(), [](const Sample& s) { return s.y > 0; }));
}

std::size_t LabeledEdgeSet::num_negative() const {
  return samples.size() - num_positive();
}

LabeledEdgeSet LabeledEdgeSet::Positives(GraphMode mode,
                                         std::span<const Edge> edges) {
  LabeledEdgeSet set;
  set.mode = mode;
  set.samples.reserve(edges.size());
  for (const Edge& e : edges) set.samples.push_back({e.a, e.b, +1});
  return set;
}

std::vector<Edge> LabeledEdgeSet::EdgesWithLabel(int y) const {
  std::vector<Edge> out;
  for (const Sample& s : samples) {
    if (s.y == y) out.push_back({s.a, s.b});
  }
  return out;
}

std::array<std::size_t, 3> LargestRemainderSizes(
    std::size_t total, const std::array<double, 3>& ratio) {
  double sum = 0.0;
  for (double r : ratio) {
    if (!(r >= 0.0)) throw ConfigError("split ratio entries must be >= 0");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("split ratio must sum to 1");
  }
  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    const double quota = ratio[i] * static_cast<double>(total);
    sizes[i] = static_cast<std::size_t>(std::floor(quota + 1e-9));
    remainder[i] = quota - static_cast<double>(sizes[i]);
    assigned += sizes[i];
  }
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    return remainder[x] > remainder[y] + 1e-9;
  });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) {
    ++sizes[order[k % 3]];
  }
  return sizes;
}

Split SplitEdges(const Graph& g, const std::array<double, 3>& ratio,
                 std::uint64_t seed) {
  const auto sizes = LargestRemainderSizes(g.num_edges(), ratio);
  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  Rng rng(seed);
  Shuffle(std::span<Edge>(edges), rng);
  Split split;
  split.ratio = ratio;
  auto first = edges.begin();
  LabeledEdgeSet* parts[3] = {&split.train, &split.validation, &split.test};
  for (int i = 0; i < 3; ++i) {
    *parts[i] = LabeledEdgeSet::Positives(
        g.mode(), std::span<const Edge>(&*first, sizes[i]));
    first += static_cast<std::ptrdiff_t>(sizes[i]);
  }
  return split;
}

LabeledEdgeSet SampleNegatives(const Graph& g, const LabeledEdgeSet& positives,
                               const NegativeSamplingOptions& options) {
  LabeledEdgeSet out = positives;
  out.mode = g.mode();
  const std::size_t wanted = options.ratio * positives.size();
  if (wanted == 0) return out;
  if (g.n_left() == 0 || g.n_right() == 0) {
    throw ConfigError("cannot sample negatives from an empty graph");
  }
  if (g.homogeneous() && g.n_left() < 2) {
    throw ConfigError("cannot sample negatives: fewer than two vertices");
  }
  if (options.reject_observed && g.NumNonEdges() == 0) {
    throw ConfigError(
        "cannot sample negatives: graph is complete, no non-edges exist");
  }
  Rng rng(options.seed);
  out.samples.reserve(out.samples.size() + wanted);
  for (std::size_t k = 0; k < wanted; ++k) {
    bool found = false;
    for (std::size_t attempt = 0; attempt < options.max_attempts_per_sample;
         ++attempt) {
      auto a = static_cast<VertexId>(rng.Below(g.n_left()));
      auto b = static_cast<VertexId>(rng.Below(g.n_right()));
      if (g.homogeneous()) {
        if (a == b) continue;
        if (a > b) std::swap(a, b);
      }
      if (options.reject_observed && g.HasEdge(a, b)) continue;
      out.samples.push_back({a, b, -1});
      found = true;
      break;
    }
    if (!found) {
      throw NumericalError(
          "negative sampling retry budget exhausted; graph too dense");
    }
  }
  return out;
}

}  // namespace lge
