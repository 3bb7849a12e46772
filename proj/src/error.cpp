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

#include "shieldsim/error.hpp"

namespace shieldsim {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kOk: return "Ok";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kZeroInverse: return "ZeroInverse";
    case ErrorCode::kRangeOverflow: return "RangeOverflow";
    case ErrorCode::kExponentRange: return "ExponentRange";
    case ErrorCode::kMaskReuse: return "MaskReuse";
    case ErrorCode::kIntegrityViolation: return "IntegrityViolation";
    case ErrorCode::kDegenerateValue: return "DegenerateValue";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kNotPrime: return "NotPrime";
    case ErrorCode::kParse: return "Parse";
    case ErrorCode::kInternal: return "Internal";
  }
  return "Unknown";
}

}  // namespace shieldsim
