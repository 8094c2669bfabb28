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

// Element access policies for the update kernels. RelaxedAccess lets several
// threads read and write the same embedding rows without a data race; values
// may be stale but are never torn.

#ifndef LGE_SRC_RELAXED_ACCESS_H_
#define LGE_SRC_RELAXED_ACCESS_H_

#include <atomic>

namespace lge::internal {

struct PlainAccess {
  static double Load(const double& x) { return x; }
  static void Store(double& x, double v) { x = v; }
};

struct RelaxedAccess {
  static double Load(const double& x) {
    return std::atomic_ref<double>(const_cast<double&>(x))
        .load(std::memory_order_relaxed);
  }
  static void Store(double& x, double v) {
    std::atomic_ref<double>(x).store(v, std::memory_order_relaxed);
  }
};

}  // namespace lge::internal

#endif  // LGE_SRC_RELAXED_ACCESS_H_
