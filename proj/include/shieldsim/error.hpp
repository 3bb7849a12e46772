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

#ifndef SHIELDSIM_ERROR_HPP_
#define SHIELDSIM_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace shieldsim {

// Numeric values are part of the C API (see shieldsim.h) and must not change.
enum class ErrorCode : int {
  kOk = 0,
  kInvalidArgument = 1,
  kDimensionMismatch = 2,
  kZeroInverse = 3,
  kRangeOverflow = 4,
  kExponentRange = 5,
  kMaskReuse = 6,
  kIntegrityViolation = 7,
  kDegenerateValue = 8,
  kTooLarge = 9,
  kNotPrime = 10,
  kParse = 11,
  kInternal = 99,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by the protocols when a U-Verify check fails. `stage` names the
// pipeline stage whose outsourced result was rejected.
class IntegrityViolation : public Error {
 public:
  IntegrityViolation(std::string stage, const std::string& detail)
      : Error(ErrorCode::kIntegrityViolation,
              "integrity violation at stage '" + stage + "': " + detail),
        stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace shieldsim

#endif  // SHIELDSIM_ERROR_HPP_
