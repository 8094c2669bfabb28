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

#ifndef LGE_INCIDENCE_H_
#define LGE_INCIDENCE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "lge/embeddings.h"
#include "lge/graph.h"

namespace lge {

// For every vertex, the samples of a LabeledEdgeSet that touch it. A
// homogeneous sample (a, b) is listed under both a and b; a bipartite one
// under left vertex a and right vertex b.
class Incidence {
 public:
  struct Entry {
    VertexId other;        // the opposite endpoint
    std::uint32_t sample;  // index into LabeledEdgeSet::samples
    std::uint8_t slot;     // 0 if this vertex is sample.a, 1 if sample.b
  };

  Incidence(const LabeledEdgeSet& data, std::size_t n_left,
            std::size_t n_right);

  std::span<const Entry> of(Side side, VertexId v) const;
  std::size_t count(Side side, VertexId v) const { return of(side, v).size(); }
  bool shared() const { return shared_; }

  // Side of the opposite endpoint for entries listed under `side`.
  Side other_side(Side side) const {
    if (shared_) return Side::kLeft;
    return side == Side::kLeft ? Side::kRight : Side::kLeft;
  }

 private:
  static void Build(std::size_t n, std::vector<std::size_t>& offsets,
                    std::vector<Entry>& entries,
                    std::vector<std::pair<VertexId, Entry>>& items);

  bool shared_ = true;
  std::vector<std::size_t> left_offsets_;
  std::vector<Entry> left_;
  std::vector<std::size_t> right_offsets_;
  std::vector<Entry> right_;
};

}  // namespace lge

#endif  // LGE_INCIDENCE_H_
