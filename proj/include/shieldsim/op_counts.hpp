// Copyright 2026 The shieldsim Authors
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

#ifndef SHIELDSIM_OP_COUNTS_HPP_
#define SHIELDSIM_OP_COUNTS_HPP_

#include <cstdint>

#include "json.hpp"

namespace shieldsim {

enum class Phase { kOffline, kOnline };

enum class OpKind {
  kMult,     // element multiplications (field or real)
  kAdd,      // additions and subtractions
  kDiv,      // divisions, reciprocals, modular inversions
  kExp,      // exponentiations
  kCmp,      // comparisons (softmax stabilization)
  kVecMat,   // whole vector-matrix products (also tallied in kMult)
};

// Tallies for one phase. Worker fields are written only by the worker calls.
struct PhaseCounts {
  std::uint64_t trusted_mults = 0;
  std::uint64_t trusted_adds = 0;
  std::uint64_t trusted_divs = 0;
  std::uint64_t trusted_exps = 0;
  std::uint64_t trusted_cmps = 0;
  std::uint64_t trusted_vecmats = 0;
  std::uint64_t worker_mults = 0;
  std::uint64_t worker_exps = 0;
  std::uint64_t elements_sent = 0;
  std::uint64_t elements_received = 0;

  PhaseCounts& operator+=(const PhaseCounts& o) noexcept;
  bool operator==(const PhaseCounts&) const = default;
};

struct OpCounts {
  PhaseCounts offline;
  PhaseCounts online;

  PhaseCounts& at(Phase p) noexcept { return p == Phase::kOffline ? offline : online; }
  const PhaseCounts& at(Phase p) const noexcept {
    return p == Phase::kOffline ? offline : online;
  }
  PhaseCounts total() const noexcept {
    PhaseCounts t = offline;
    t += online;
    return t;
  }
  OpCounts& operator+=(const OpCounts& o) noexcept {
    offline += o.offline;
    online += o.online;
    return *this;
  }
  bool operator==(const OpCounts&) const = default;
};

nlohmann::json to_json(const PhaseCounts& c);
nlohmann::json to_json(const OpCounts& c);

}  // namespace shieldsim

#endif  // SHIELDSIM_OP_COUNTS_HPP_
