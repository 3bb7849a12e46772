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

#ifndef SHIELDSIM_RNG_HPP_
#define SHIELDSIM_RNG_HPP_

#include <cstdint>

namespace shieldsim {

// Counter-based generator: the i-th output (i = 1, 2, ...) is
// mix64(seed + i * 0x9E3779B97F4A7C15), where mix64 is the SplitMix64
// finalizer. The stream depends only on (seed, number of draws), so it is
// identical on every platform and compiler.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }

  std::uint64_t next_u64() noexcept;

  // Uniform on [0, bound). bound must be nonzero. Rejection sampling, no
  // modulo bias.
  std::uint64_t uniform_below(std::uint64_t bound) noexcept;

  // Uniform on [0, 1) with 53 random bits.
  double uniform_unit() noexcept;

  // Uniform on [lo, hi].
  double uniform_real(double lo, double hi) noexcept;

  // Seed of an independent child stream. Splitting rule:
  //   derive(seed, stream) = mix64(seed ^ mix64(stream + 1)).
  // Used for per-trial sessions and for the adversary's private stream.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) noexcept;

  static std::uint64_t mix64(std::uint64_t z) noexcept;

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace shieldsim

#endif  // SHIELDSIM_RNG_HPP_
