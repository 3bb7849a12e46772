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

#ifndef SHIELDSIM_OUT_SOFTMAX_HPP_
#define SHIELDSIM_OUT_SOFTMAX_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "shieldsim/session.hpp"

namespace shieldsim {

// OutSoftMax: the worker evaluates e^(x - r) on a masked vector and the
// trusted side restores e^x = e^(x - r) * e^r with precomputed e^r. Sums and
// divisions stay trusted.

inline constexpr double kDefaultMaskBound = 30.0;

struct SoftmaxMask {
  std::vector<double> r;      // uniform on [-bound, bound]
  std::vector<double> exp_r;  // e^r
  double bound = 0.0;
  bool used = false;
};

struct SoftmaxResult {
  std::vector<double> probs;
  double s = 0.0;  // normalization sum
};

struct SoftmaxOptions {
  bool stabilize = true;
  double mask_bound = kDefaultMaskBound;
};

// Throws ExponentRange unless 0 <= bound <= exp_cap.
SoftmaxMask osm_offline(std::size_t n, double bound, SeededRng& rng,
                        double exp_cap = 700.0);
// Counts n offline trusted exponentiations.
SoftmaxMask osm_offline(Session& s, std::size_t n, double bound);

// Subtracts max(x); n-1 comparisons and n subtractions.
std::vector<double> osm_stabilize(Session& s, std::span<const double> x);

// Masks x, round-trips it through worker_exp and unmasks. Consumes the mask.
// Throws MaskReuse, DimensionMismatch, or ExponentRange when
// max|x| + bound > exp_cap.
std::vector<double> osm_exponentials(Session& s, std::span<const double> x,
                                     SoftmaxMask& mask);

// s = sum(e), y = e / s.
SoftmaxResult osm_normalize(Session& s, std::span<const double> e);

SoftmaxResult osm_run(Session& s, std::span<const double> x,
                      const SoftmaxOptions& opts = {});

// Plain double-precision softmax with max subtraction; no counting. Used as
// the trusted-side reference and by the plaintext pipelines.
std::vector<double> reference_softmax(std::span<const double> x);

}  // namespace shieldsim

#endif  // SHIELDSIM_OUT_SOFTMAX_HPP_
