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

#ifndef LGE_TRACE_H_
#define LGE_TRACE_H_

#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "lge/embeddings.h"

namespace lge {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

// One row per completed epoch (SGD) or sweep (DCD). Metrics that were not
// evaluated at this epoch are NaN and serialize as empty CSV cells / null.
struct EpochRecord {
  int epoch = 0;
  double avg_norm = 0.0;
  double avg_grad_norm = 0.0;
  double loss = 0.0;
  double train_ap = kMissing;
  double test_ap = kMissing;
  double macro_f1 = kMissing;
  double seconds = 0.0;
};

enum class TrainerKind { kSgd, kDcd };

struct TrainTrace {
  TrainerKind trainer = TrainerKind::kSgd;
  std::vector<EpochRecord> records;
};

// Called after every epoch with the current embeddings. Fills the metric
// fields of the record it is handed.
using EpochHook =
    std::function<void(int epoch, const EmbeddingStore&, EpochRecord&)>;

// CSV columns: epoch|sweep, avg_norm, avg_grad_norm, train_loss|hinge_loss,
// train_ap, test_ap, macro_f1, seconds.
std::string TraceCsvHeader(TrainerKind trainer);
void WriteTraceCsv(std::ostream& out, const TrainTrace& trace,
                   bool include_seconds = true);
TrainTrace ReadTraceCsv(std::istream& in);
void WriteTraceJsonl(std::ostream& out, const TrainTrace& trace);

}  // namespace lge

#endif  // LGE_TRACE_H_
