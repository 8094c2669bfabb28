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

#include "lge/trace.h"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "lge/error.h"

namespace lge {
namespace {

std::string Cell(double x) {
  if (std::isnan(x)) return "";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, r.ptr);
}

double ParseCell(const std::string& s, std::size_t line) {
  if (s.empty()) return kMissing;
  double x = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
  if (r.ec != std::errc()) throw ParseError("bad trace cell '" + s + "'", line);
  return x;
}

nlohmann::json JsonValue(double x) {
  if (std::isnan(x)) return nullptr;
  return x;
}

}  // namespace

std::string TraceCsvHeader(TrainerKind trainer) {
  return trainer == TrainerKind::kSgd
             ? "epoch,avg_norm,avg_grad_norm,train_loss,train_ap,test_ap,"
               "macro_f1,seconds"
             : "sweep,avg_norm,avg_grad_norm,hinge_loss,train_ap,test_ap,"
               "macro_f1,seconds";
}

void WriteTraceCsv(std::ostream& out, const TrainTrace& trace,
                   bool include_seconds) {
  out << TraceCsvHeader(trace.trainer) << '\n';
  for (const EpochRecord& r : trace.records) {
    out << r.epoch << ',' << Cell(r.avg_norm) << ',' << Cell(r.avg_grad_norm)
        << ',' << Cell(r.loss) << ',' << Cell(r.train_ap) << ','
        << Cell(r.test_ap) << ',' << Cell(r.macro_f1) << ','
        << (include_seconds ? Cell(r.seconds) : "") << '\n';
  }
}

TrainTrace ReadTraceCsv(std::istream& in) {
  TrainTrace trace;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty trace", 1);
  if (line == TraceCsvHeader(TrainerKind::kSgd)) {
    trace.trainer = TrainerKind::kSgd;
  } else if (line == TraceCsvHeader(TrainerKind::kDcd)) {
    trace.trainer = TrainerKind::kDcd;
  } else {
    throw ParseError("unrecognized trace header", 1);
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 8) throw ParseError("trace row needs 8 cells", line_no);
    EpochRecord r;
    r.epoch = static_cast<int>(ParseCell(cells[0], line_no));
    r.avg_norm = ParseCell(cells[1], line_no);
    r.avg_grad_norm = ParseCell(cells[2], line_no);
    r.loss = ParseCell(cells[3], line_no);
    r.train_ap = ParseCell(cells[4], line_no);
    r.test_ap = ParseCell(cells[5], line_no);
    r.macro_f1 = ParseCell(cells[6], line_no);
    r.seconds = ParseCell(cells[7], line_no);
    trace.records.push_back(r);
  }
  return trace;
}

void WriteTraceJsonl(std::ostream& out, const TrainTrace& trace) {
  const bool sgd = trace.trainer == TrainerKind::kSgd;
  for (const EpochRecord& r : trace.records) {
    nlohmann::ordered_json j;
    j[sgd ? "epoch" : "sweep"] = r.epoch;
    j["avg_norm"] = JsonValue(r.avg_norm);
    j["avg_grad_norm"] = JsonValue(r.avg_grad_norm);
    j[sgd ? "train_loss" : "hinge_loss"] = JsonValue(r.loss);
    j["train_ap"] = JsonValue(r.train_ap);
    j["test_ap"] = JsonValue(r.test_ap);
    j["macro_f1"] = JsonValue(r.macro_f1);
    j["seconds"] = JsonValue(r.seconds);
    out << j.dump() << '\n';
  }
}

}  // namespace lge
