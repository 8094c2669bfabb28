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

#ifndef LGE_EMBEDDINGS_H_
#define LGE_EMBEDDINGS_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "lge/graph.h"

namespace lge {

enum class Side { kLeft, kRight };

// One dense row of `dim` doubles per vertex. In homogeneous mode the left
// and right views address the same storage, so x_a^T x_b uses one vector per
// vertex. Bipartite mode keeps a second matrix for the right partition.
class EmbeddingStore {
 public:
  EmbeddingStore() = default;
  EmbeddingStore(GraphMode mode, std::size_t n_left, std::size_t n_right,
                 std::size_t dim);

  GraphMode mode() const { return mode_; }
  bool shared() const { return mode_ == GraphMode::kHomogeneous; }
  std::size_t dim() const { return dim_; }
  std::size_t n_left() const { return n_left_; }
  std::size_t n_right() const { return n_right_; }
  std::size_t rows(Side side) const {
    return side == Side::kLeft ? n_left_ : n_right_;
  }

  std::span<double> row(Side side, VertexId v);
  std::span<const double> row(Side side, VertexId v) const;
  std::span<double> left(VertexId v) { return row(Side::kLeft, v); }
  std::span<const double> left(VertexId v) const { return row(Side::kLeft, v); }
  std::span<double> right(VertexId v) { return row(Side::kRight, v); }
  std::span<const double> right(VertexId v) const {
    return row(Side::kRight, v);
  }

  // Whole matrices, row-major. right_data() aliases left_data() when shared.
  std::span<double> left_data() { return left_; }
  std::span<const double> left_data() const { return left_; }
  std::span<double> right_data() { return shared() ? left_data() : right_; }
  std::span<const double> right_data() const {
    return shared() ? left_data() : std::span<const double>(right_);
  }

  // left[a] . right[b]. Throws std::out_of_range on a bad id.
  double Dot(VertexId a, VertexId b) const;

  bool AllFinite() const;

  friend bool operator==(const EmbeddingStore&,
                         const EmbeddingStore&) = default;

 private:
  GraphMode mode_ = GraphMode::kHomogeneous;
  std::size_t n_left_ = 0;
  std::size_t n_right_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> left_;
  std::vector<double> right_;
};

// I.i.d. U[lo, hi] entries. Defaults follow the training protocol.
EmbeddingStore InitUniform(GraphMode mode, std::size_t n_left,
                           std::size_t n_right, std::size_t dim,
                           double lo = -0.1, double hi = 0.1,
                           std::uint64_t seed = 0);

struct NormStats {
  std::size_t count = 0;
  double avg_sq_norm = 0.0;
  double avg_norm = 0.0;
  double max_norm = 0.0;
  double total_sq_norm = 0.0;
};

struct NormReport {
  NormStats left;
  NormStats right;     // equals left when the store is shared
  NormStats combined;  // over all distinct vectors
};

NormStats ComputeNormStats(const EmbeddingStore& store, Side side);
NormReport ComputeNormReport(const EmbeddingStore& store);

enum class Precision { kDouble, kFloat };

// Text format: header "n_left n_right dim mode", then one row per line as
// "id v_1 ... v_D". Bipartite files list the left rows, then the right rows.
// Double precision output round-trips bit-exactly.
void WriteEmbeddings(std::ostream& out, const EmbeddingStore& store,
                     Precision precision = Precision::kDouble);
EmbeddingStore ReadEmbeddings(std::istream& in);
void SaveEmbeddings(const std::filesystem::path& path,
                    const EmbeddingStore& store,
                    Precision precision = Precision::kDouble);
EmbeddingStore LoadEmbeddings(const std::filesystem::path& path);

}  // namespace lge

#endif  // LGE_EMBEDDINGS_H_
