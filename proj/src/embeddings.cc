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

#include "lge/embeddings.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "lge/error.h"
#include "lge/numeric.h"
#include "lge/random.h"

namespace lge {

EmbeddingStore::EmbeddingStore(GraphMode mode, std::size_t n_left,
                               std::size_t n_right, std::size_t dim)
    : mode_(mode),
      n_left_(n_left),
      n_right_(mode == GraphMode::kHomogeneous ? n_left : n_right),
      dim_(dim),
      left_(n_left * dim, 0.0) {
  if (!shared()) right_.assign(n_right_ * dim, 0.0);
}

std::span<double> EmbeddingStore::row(Side side, VertexId v) {
  if (side == Side::kLeft || shared()) {
    return std::span<double>(left_).subspan(std::size_t{v} * dim_, dim_);
  }
  return std::span<double>(right_).subspan(std::size_t{v} * dim_, dim_);
}

std::span<const double> EmbeddingStore::row(Side side, VertexId v) const {
  if (side == Side::kLeft || shared()) {
    return std::span<const double>(left_).subspan(std::size_t{v} * dim_, dim_);
  }
  return std::span<const double>(right_).subspan(std::size_t{v} * dim_, dim_);
}

double EmbeddingStore::Dot(VertexId a, VertexId b) const {
  if (a >= n_left_ || b >= n_right_) {
    throw std::out_of_range("embedding id out of range: (" + std::to_string(a) +
                            ", " + std::to_string(b) + ")");
  }
  return lge::Dot(left(a), right(b));
}

bool EmbeddingStore::AllFinite() const {
  auto finite = [](double x) { return std::isfinite(x); };
  return std::all_of(left_.begin(), left_.end(), finite) &&
         std::all_of(right_.begin(), right_.end(), finite);
}

EmbeddingStore InitUniform(GraphMode mode, std::size_t n_left,
                           std::size_t n_right, std::size_t dim, double lo,
                           double hi, std::uint64_t seed) {
  if (!(lo <= hi)) throw ConfigError("init range requires lo <= hi");
  if (dim < 1) throw ConfigError("embedding dimension must be >= 1");
  EmbeddingStore store(mode, n_left, n_right, dim);
  Rng rng(seed);
  for (double& x : store.left_data()) x = rng.Uniform(lo, hi);
  if (!store.shared()) {
    for (double& x : store.right_data()) x = rng.Uniform(lo, hi);
  }
  return store;
}

NormStats ComputeNormStats(const EmbeddingStore& store, Side side) {
  NormStats s;
  s.count = store.rows(side);
  for (VertexId v = 0; v < s.count; ++v) {
    const double sq = SquaredNorm(store.row(side, v));
    const double norm = std::sqrt(sq);
    s.total_sq_norm += sq;
    s.avg_norm += norm;
    s.max_norm = std::max(s.max_norm, norm);
  }
  if (s.count > 0) {
    s.avg_sq_norm = s.total_sq_norm / static_cast<double>(s.count);
    s.avg_norm /= static_cast<double>(s.count);
  }
  return s;
}

NormReport ComputeNormReport(const EmbeddingStore& store) {
  NormReport r;
  r.left = ComputeNormStats(store, Side::kLeft);
  if (store.shared()) {
    r.right = r.left;
    r.combined = r.left;
    return r;
  }
  r.right = ComputeNormStats(store, Side::kRight);
  NormStats& c = r.combined;
  c.count = r.left.count + r.right.count;
  c.total_sq_norm = r.left.total_sq_norm + r.right.total_sq_norm;
  c.max_norm = std::max(r.left.max_norm, r.right.max_norm);
  if (c.count > 0) {
    c.avg_sq_norm = c.total_sq_norm / static_cast<double>(c.count);
    c.avg_norm = (r.left.avg_norm * static_cast<double>(r.left.count) +
                  r.right.avg_norm * static_cast<double>(r.right.count)) /
                 static_cast<double>(c.count);
  }
  return r;
}

namespace {

void WriteRows(std::ostream& out, const EmbeddingStore& store, Side side,
               Precision precision) {
  char buf[64];
  for (VertexId v = 0; v < store.rows(side); ++v) {
    out << v;
    for (double x : store.row(side, v)) {
      const auto result =
          precision == Precision::kDouble
              ? std::to_chars(buf, buf + sizeof(buf), x)
              : std::to_chars(buf, buf + sizeof(buf), static_cast<float>(x));
      out << ' ' << std::string_view(buf, result.ptr - buf);
    }
    out << '\n';
  }
}

void ReadRows(std::istream& in, EmbeddingStore& store, Side side,
              std::size_t& line_no) {
  std::string line;
  for (VertexId v = 0; v < store.rows(side); ++v) {
    if (!std::getline(in, line)) {
      throw ParseError("embedding file truncated", line_no + 1);
    }
    ++line_no;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    std::uint64_t id = 0;
    auto [next, ec] = std::from_chars(p, end, id);
    if (ec != std::errc() || id != v) {
      throw ParseError("expected row id " + std::to_string(v), line_no);
    }
    p = next;
    for (double& x : store.row(side, v)) {
      while (p < end && *p == ' ') ++p;
      auto [after, err] = std::from_chars(p, end, x);
      if (err != std::errc()) throw ParseError("bad embedding value", line_no);
      p = after;
    }
  }
}

}  // namespace

void WriteEmbeddings(std::ostream& out, const EmbeddingStore& store,
                     Precision precision) {
  out << store.n_left() << ' ' << store.n_right() << ' ' << store.dim() << ' '
      << ToString(store.mode()) << '\n';
  WriteRows(out, store, Side::kLeft, precision);
  if (!store.shared()) WriteRows(out, store, Side::kRight, precision);
}

EmbeddingStore ReadEmbeddings(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing header", 1);
  std::size_t n_left = 0, n_right = 0, dim = 0;
  std::string mode;
  {
    std::istringstream header(line);
    if (!(header >> n_left >> n_right >> dim >> mode)) {
      throw ParseError("malformed header '" + line + "'", 1);
    }
  }
  EmbeddingStore store(ParseGraphMode(mode), n_left, n_right, dim);
  std::size_t line_no = 1;
  ReadRows(in, store, Side::kLeft, line_no);
  if (!store.shared()) ReadRows(in, store, Side::kRight, line_no);
  return store;
}

void SaveEmbeddings(const std::filesystem::path& path,
                    const EmbeddingStore& store, Precision precision) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  WriteEmbeddings(out, store, precision);
}

EmbeddingStore LoadEmbeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open embeddings " + path.string());
  return ReadEmbeddings(in);
}

}  // namespace lge
