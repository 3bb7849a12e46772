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

#ifndef SHIELDSIM_SECURITY_ANALYSIS_HPP_
#define SHIELDSIM_SECURITY_ANALYSIS_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "shieldsim/field.hpp"

namespace shieldsim {

// All probabilities are returned as log2 values so that they stay finite for
// large n.

double log2_factorial(double n);
double log2_binomial(double n, double k);

// Probability that an attacker recovers the original rows of a blinded
// matrix by guessing which n of the 2n rows are originals, which mask goes
// with each original (with replacement), each scalar in [-L, L] \ {0}, and
// the ordering:  1/C(2n, n) * (1/n)^n * (1/2L)^n * 1/n!.
double prob_theorem2(std::uint64_t n, std::uint64_t L);

enum class SoftmaxAttack { kA, kB };

// Success probability of a tamper against the softmax hash touching k
// entries: (1/n)(1/2L)^k for attack a, (1/n)(1/2L)^(3k) for attack b.
double prob_softmax_attack(std::uint64_t n, std::uint64_t L, std::uint64_t k,
                           SoftmaxAttack variant);

// Security level of OutAttnMult in bits for scalars drawn from d values and
// m rows. The product form log2(d) * log2((2m)!) reproduces the 13,471-bit
// figure quoted for d = 256, m = 128; the sum form log2(d * (2m)!) is what
// the formula literally says.
double security_level_oam(double d, std::uint64_t m);
double security_level_oam_printed(double d, std::uint64_t m);

// log2(n * 2^d_bits * (2^d_bits)^n) = log2 n + d_bits + n d_bits.
double security_level_softmax(std::uint64_t n, double d_bits);

// Monte Carlo version of the guessing game behind prob_theorem2.
struct GuessingGameResult {
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double rate = 0.0;
  double std_error = 0.0;  // binomial, at the theoretical probability
  double expected = 0.0;   // 2^prob_theorem2(n, L)
};

// Trial i uses the stream SeededRng::derive(seed, i), so the result does not
// depend on `threads`.
GuessingGameResult theorem2_game(std::uint64_t n, std::uint64_t L,
                                 std::uint64_t trials, std::uint64_t seed,
                                 unsigned threads = 1);

// ---------------------------------------------------------------------------
// Feasible sets at toy scale.

inline constexpr Residue kFeasibleMaxPrime = 13;
inline constexpr std::size_t kFeasibleMaxRows = 5;
inline constexpr std::size_t kFeasibleMaxDim = 2;

struct FeasibleSetResult {
  std::vector<std::vector<Residue>> members;  // sorted, deduplicated
  std::size_t size = 0;
  std::size_t t = 0;
  std::size_t n = 0;
  Residue prime = 0;
};

// Enumerates every pre-image x = d (xbar_sigma(i) - x') over all mask index
// sets Omega of size t - n in [t], all orderings sigma of the remaining rows,
// all nonzero d, and all x' in the rows indexed by Omega (x' = 0 when Omega is
// empty). Rows of x_hat are the t transformed vectors. Throws TooLarge beyond
// the toy bounds above.
FeasibleSetResult feasible_set_enumerate(const FieldMatrix& x_hat, std::size_t n_true);

// True iff every member of `small` is a member of `large`.
bool feasible_subset(const FeasibleSetResult& small, const FeasibleSetResult& large);

}  // namespace shieldsim

#endif  // SHIELDSIM_SECURITY_ANALYSIS_HPP_
