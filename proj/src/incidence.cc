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

#include "lge/incidence.h"

#include <string>

#include "lge/error.h"

namespace lge {

Incidence::Incidence(const LabeledEdgeSet& data, std::size_t n_left,
                     std::size_t n_right)
    : shared_(data.mode == GraphMode::kHomogeneous) {
  std::vector<std::pair<VertexId, Entry>> left_items, right_items;
  left_items.reserve(shared_ ? 2 * data.size() : data.size());
  if (!shared_) right_items.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Sample& s = data.samples[i];
    const auto idx = static_cast<std::uint32_t>(i);
    if (s.a >= n_left || s.b >= (shared_ ? n_left : n_right)) {
      throw ConfigError("sample " + std::to_string(i) +
                        " references a vertex outside the embedding store");
    }
    left_items.push_back({s.a, Entry{s.b, idx, 0}});
    if (shared_) {
      left_items.push_back({s.b, Entry{s.a, idx, 1}});
    } else {
      right_items.push_back({s.b, Entry{s.a, idx, 1}});
    }
  }
  Build(n_left, left_offsets_, left_, left_items);
  if (!shared_) Build(n_right, right_offsets_, right_, right_items);
}

void Incidence::Build(std::size_t n, std::vector<std::size_t>& offsets,
                      std::vector<Entry>& entries,
                      std::vector<std::pair<VertexId, Entry>>& items) {
  offsets.assign(n + 1, 0);
  for (const auto& [v, e] : items) ++offsets[v + 1];
  for (std::size_t v = 0; v < n; ++v) offsets[v + 1] += offsets[v];
  entries.resize(items.size());
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  // Counting sort keeps sample order within each vertex.
  for (const auto& [v, e] : items) entries[cursor[v]++] = e;
}

std::span<const Incidence::Entry> Incidence::of(Side side, VertexId v) const {
  if (side == Side::kLeft || shared_) {
    return std::span<const Entry>(left_).subspan(
        left_offsets_[v], left_offsets_[v + 1] - left_offsets_[v]);
  }
  return std::span<const Entry>(right_).subspan(
      right_offsets_[v], right_offsets_[v + 1] - right_offsets_[v]);
}

}  // namespace lge
