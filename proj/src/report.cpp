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

#include "shieldsim/report.hpp"

#include <cmath>

#include "shieldsim/error.hpp"

namespace shieldsim {

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kOk: return kExitOk;
    case ErrorCode::kIntegrityViolation: return kExitIntegrity;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kDimensionMismatch:
    case ErrorCode::kNotPrime:
    case ErrorCode::kParse:
    case ErrorCode::kTooLarge:
      return kExitUsage;
    case ErrorCode::kRangeOverflow:
    case ErrorCode::kExponentRange:
      return kExitRange;
    default:
      return kExitFailure;
  }
}

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) return {};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double fit_power_exponent(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "fit_power_exponent: need >= 2 paired points");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "fit_power_exponent: values must be positive");
    }
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw Error(ErrorCode::kInvalidArgument, "fit_power_exponent: x values all equal");
  return (n * sxy - sx * sy) / den;
}

nlohmann::json stages_json(const Session& s, bool timings) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [stage, counts] : s.stage_counts()) {
    out[stage]["offline"] = to_json(counts.offline);
    out[stage]["online"] = to_json(counts.online);
    out[stage]["wall_ms"] = 0.0;
  }
  for (const auto& [stage, ms] : s.stage_wall_ms()) {
    if (!out.contains(stage)) {
      out[stage]["offline"] = to_json(PhaseCounts{});
      out[stage]["online"] = to_json(PhaseCounts{});
    }
    out[stage]["wall_ms"] = timings ? ms : 0.0;
  }
  return out;
}

nlohmann::json verifications_json(const Session& s) {
  nlohmann::json out = nlohmann::json::array();
  for (const VerificationRecord& r : s.verifications()) {
    out.push_back({{"check", r.check},
                   {"stage", r.stage},
                   {"pass", r.pass},
                   {"trusted_mults", r.trusted_mults}});
  }
  return out;
}

nlohmann::json detection_json(std::uint64_t trials, std::uint64_t detections,
                              const nlohmann::json& theory_bound) {
  const WilsonInterval w = wilson_interval(detections, trials);
  return {{"trials", trials},
          {"detections", detections},
          {"rate", trials ? static_cast<double>(detections) / static_cast<double>(trials) : 0.0},
          {"wilson_low", w.low},
          {"wilson_high", w.high},
          {"theory_bound", theory_bound}};
}

std::string dump_report(const nlohmann::json& report) {
  return report.dump(2) + "\n";
}

}  // namespace shieldsim
