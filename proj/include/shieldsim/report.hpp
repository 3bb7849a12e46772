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

#ifndef SHIELDSIM_REPORT_HPP_
#define SHIELDSIM_REPORT_HPP_

#include <cstdint>
#include <span>
#include <string>

#include <json.hpp>

#include "shieldsim/error.hpp"
#include "shieldsim/session.hpp"

namespace shieldsim {

inline constexpr int kReportSchemaVersion = 1;

// Process exit codes shared by the CLI and the C API.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitIntegrity = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitRange = 65;

int exit_code_for(ErrorCode code) noexcept;

struct WilsonInterval {
  double low = 0.0;
  double high = 1.0;
};

// 95% Wilson score interval for `successes` out of `trials`.
WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials,
                               double z = 1.959963984540054);

// Least-squares slope of log(y) against log(x).
double fit_power_exponent(std::span<const double> x, std::span<const double> y);

// {stage: {"offline": {...}, "online": {...}, "wall_ms": t}} for every stage
// the session touched. Timings are zeroed when `timings` is false so that
// reports can be diffed.
nlohmann::json stages_json(const Session& s, bool timings);
nlohmann::json verifications_json(const Session& s);

nlohmann::json detection_json(std::uint64_t trials, std::uint64_t detections,
                              const nlohmann::json& theory_bound);

// Canonical serialization: sorted keys, two-space indent, trailing newline.
std::string dump_report(const nlohmann::json& report);

}  // namespace shieldsim

#endif  // SHIELDSIM_REPORT_HPP_
