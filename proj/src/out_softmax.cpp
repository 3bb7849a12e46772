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

#include "shieldsim/out_softmax.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "shieldsim/error.hpp"

namespace shieldsim {

SoftmaxMask osm_offline(std::size_t n, double bound, SeededRng& rng,
                        double exp_cap) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "osm_offline: n must be >= 1");
  if (!(bound >= 0.0) || bound > exp_cap) {
    std::ostringstream os;
    os << "osm_offline: mask bound " << bound << " outside [0, " << exp_cap << "]";
    throw Error(ErrorCode::kExponentRange, os.str());
  }
  SoftmaxMask mask;
  mask.bound = bound;
  mask.r.resize(n);
  mask.exp_r.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    mask.r[i] = bound == 0.0 ? 0.0 : rng.uniform_real(-bound, bound);
    mask.exp_r[i] = std::exp(mask.r[i]);
  }
  return mask;
}

SoftmaxMask osm_offline(Session& s, std::size_t n, double bound) {
  Session::PhaseScope offline(s, Phase::kOffline);
  SoftmaxMask mask = osm_offline(n, bound, s.rng(), s.exp_cap());
  s.count(OpKind::kExp, n);
  return mask;
}

std::vector<double> osm_stabilize(Session& s, std::span<const double> x) {
  if (x.empty()) return {};
  const double mx = *std::max_element(x.begin(), x.end());
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - mx;
  s.count(OpKind::kCmp, x.size() - 1);
  s.count(OpKind::kAdd, x.size());
  return out;
}

std::vector<double> osm_exponentials(Session& s, std::span<const double> x,
                                     SoftmaxMask& mask) {
  if (mask.used) throw Error(ErrorCode::kMaskReuse, "softmax mask already consumed");
  if (x.size() != mask.r.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "osm_exponentials: mask length differs");
  }
  double max_abs = 0.0;
  for (double v : x) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kExponentRange, "osm_exponentials: non-finite input");
    }
    max_abs = std::max(max_abs, std::abs(v));
  }
  if (max_abs + mask.bound > s.exp_cap()) {
    std::ostringstream os;
    os << "osm_exponentials: max|x| + B = " << max_abs + mask.bound
       << " exceeds exp_cap " << s.exp_cap();
    throw Error(ErrorCode::kExponentRange, os.str());
  }
  mask.used = true;

  std::vector<double> masked(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) masked[i] = x[i] - mask.r[i];
  s.count(OpKind::kAdd, x.size());

  std::vector<double> e = worker_exp(s, masked);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] *= mask.exp_r[i];
  s.count(OpKind::kMult, e.size());
  return e;
}

SoftmaxResult osm_normalize(Session& s, std::span<const double> e) {
  SoftmaxResult out;
  for (double v : e) out.s += v;
  if (!e.empty()) s.count(OpKind::kAdd, e.size() - 1);
  out.probs.resize(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) out.probs[i] = e[i] / out.s;
  s.count(OpKind::kDiv, e.size());
  return out;
}

SoftmaxResult osm_run(Session& s, std::span<const double> x,
                      const SoftmaxOptions& opts) {
  if (x.empty()) throw Error(ErrorCode::kInvalidArgument, "osm_run: empty input");
  std::vector<double> input(x.begin(), x.end());
  if (opts.stabilize) input = osm_stabilize(s, input);
  SoftmaxMask mask = osm_offline(s, input.size(), opts.mask_bound);
  const std::vector<double> e = osm_exponentials(s, input, mask);
  return osm_normalize(s, e);
}

std::vector<double> reference_softmax(std::span<const double> x) {
  if (x.empty()) return {};
  const double mx = *std::max_element(x.begin(), x.end());
  std::vector<double> out(x.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = std::exp(x[i] - mx);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

}  // namespace shieldsim
