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

#include "shieldsim/security_analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <thread>

#include "shieldsim/error.hpp"
#include "shieldsim/rng.hpp"

namespace shieldsim {

double log2_factorial(double n) {
  return std::lgamma(n + 1.0) * std::numbers::log2e;
}

double log2_binomial(double n, double k) {
  return log2_factorial(n) - log2_factorial(k) - log2_factorial(n - k);
}

double prob_theorem2(std::uint64_t n, std::uint64_t L) {
  if (n == 0 || L == 0) throw Error(ErrorCode::kInvalidArgument, "prob_theorem2: n, L >= 1");
  const double nn = static_cast<double>(n);
  return -log2_binomial(2 * nn, nn) - nn * std::log2(nn) -
         nn * std::log2(2.0 * static_cast<double>(L)) - log2_factorial(nn);
}

double prob_softmax_attack(std::uint64_t n, std::uint64_t L, std::uint64_t k,
                           SoftmaxAttack variant) {
  if (n == 0 || L == 0 || k == 0) {
    throw Error(ErrorCode::kInvalidArgument, "prob_softmax_attack: n, L, k >= 1");
  }
  const double per = -std::log2(2.0 * static_cast<double>(L));
  const double reps = static_cast<double>(variant == SoftmaxAttack::kA ? k : 3 * k);
  return -std::log2(static_cast<double>(n)) + reps * per;
}

double security_level_oam(double d, std::uint64_t m) {
  if (!(d >= 1.0) || m == 0) throw Error(ErrorCode::kInvalidArgument, "security_level_oam: d >= 1, m >= 1");
  return std::log2(d) * log2_factorial(2.0 * static_cast<double>(m));
}

double security_level_oam_printed(double d, std::uint64_t m) {
  if (!(d >= 1.0) || m == 0) throw Error(ErrorCode::kInvalidArgument, "security_level_oam: d >= 1, m >= 1");
  return std::log2(d) + log2_factorial(2.0 * static_cast<double>(m));
}

double security_level_softmax(std::uint64_t n, double d_bits) {
  if (n == 0 || d_bits < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "security_level_softmax: n >= 1, d_bits >= 0");
  }
  const double nn = static_cast<double>(n);
  return std::log2(nn) + d_bits + nn * d_bits;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::size_t> random_perm(std::size_t k, SeededRng& rng) {
  const Permutation p = sample_permutation(k, rng);
  return {p.indices().begin(), p.indices().end()};
}

// n distinct indices of [2n], as a sorted list.
std::vector<std::size_t> random_subset(std::size_t n, SeededRng& rng) {
  std::vector<std::size_t> p = random_perm(2 * n, rng);
  p.resize(n);
  std::sort(p.begin(), p.end());
  return p;
}

bool play_once(std::size_t n, std::uint64_t L, SeededRng& rng) {
  // Secret layout.
  const auto subset = random_subset(n, rng);
  const auto masks = random_perm(n, rng);  // the true assignment is a bijection
  std::vector<std::uint64_t> scalars(n);
  for (auto& v : scalars) v = rng.uniform_below(2 * L);
  const auto order = random_perm(n, rng);

  // Attacker guesses; mask choices are independent (with replacement).
  bool ok = random_subset(n, rng) == subset;
  for (std::size_t i = 0; i < n; ++i) ok &= rng.uniform_below(n) == masks[i];
  for (std::size_t i = 0; i < n; ++i) ok &= rng.uniform_below(2 * L) == scalars[i];
  ok &= random_perm(n, rng) == order;
  return ok;
}

}  // namespace

GuessingGameResult theorem2_game(std::uint64_t n, std::uint64_t L,
                                 std::uint64_t trials, std::uint64_t seed,
                                 unsigned threads) {
  if (n == 0 || L == 0) throw Error(ErrorCode::kInvalidArgument, "theorem2_game: n, L >= 1");
  threads = std::max(1u, threads);
  std::vector<std::uint64_t> hits(threads, 0);
  auto work = [&](unsigned w) {
    for (std::uint64_t i = w; i < trials; i += threads) {
      SeededRng rng(SeededRng::derive(seed, i));
      if (play_once(n, L, rng)) ++hits[w];
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  GuessingGameResult r;
  r.trials = trials;
  r.successes = std::accumulate(hits.begin(), hits.end(), std::uint64_t{0});
  r.rate = trials ? static_cast<double>(r.successes) / static_cast<double>(trials) : 0.0;
  r.expected = std::exp2(prob_theorem2(n, L));
  r.std_error = trials ? std::sqrt(r.expected * (1.0 - r.expected) / static_cast<double>(trials)) : 0.0;
  return r;
}

// ---------------------------------------------------------------------------

FeasibleSetResult feasible_set_enumerate(const FieldMatrix& x_hat, std::size_t n_true) {
  const FieldConfig& f = x_hat.field();
  const std::size_t t = x_hat.rows();
  const std::size_t dim = x_hat.cols();
  if (f.p() > kFeasibleMaxPrime || t > kFeasibleMaxRows || dim > kFeasibleMaxDim) {
    throw Error(ErrorCode::kTooLarge,
                "feasible_set_enumerate: limited to prime <= 13, t <= 5, dim <= 2");
  }
  if (n_true == 0 || n_true > t) {
    throw Error(ErrorCode::kInvalidArgument, "feasible_set_enumerate: need 1 <= n <= t");
  }
  std::set<std::vector<Residue>> found;
  const std::vector<Residue> zero(dim, 0);

  // Omega as a bitmask over [t] with t - n bits set.
  for (std::uint32_t omega = 0; omega < (1u << t); ++omega) {
    if (static_cast<std::size_t>(std::popcount(omega)) != t - n_true) continue;
    std::vector<std::size_t> originals;
    std::vector<std::vector<Residue>> phi;
    for (std::size_t i = 0; i < t; ++i) {
      const auto row = x_hat.row(i);
      if (omega & (1u << i)) {
        phi.emplace_back(row.begin(), row.end());
      } else {
        originals.push_back(i);
      }
    }
    if (phi.empty()) phi.push_back(zero);

    std::vector<std::size_t> sigma(originals.size());
    std::iota(sigma.begin(), sigma.end(), 0);
    do {
      for (std::size_t i = 0; i < sigma.size(); ++i) {
        const auto xbar = x_hat.row(originals[sigma[i]]);
        for (const auto& xp : phi) {
          for (Residue d = 1; d < f.p(); ++d) {
            std::vector<Residue> x(dim);
            for (std::size_t c = 0; c < dim; ++c) x[c] = f.mul(d, f.sub(xbar[c], xp[c]));
            found.insert(std::move(x));
          }
        }
      }
    } while (std::next_permutation(sigma.begin(), sigma.end()));
  }

  FeasibleSetResult r;
  r.members.assign(found.begin(), found.end());
  r.size = r.members.size();
  r.t = t;
  r.n = n_true;
  r.prime = f.p();
  return r;
}

bool feasible_subset(const FeasibleSetResult& small, const FeasibleSetResult& large) {
  return std::includes(large.members.begin(), large.members.end(),
                       small.members.begin(), small.members.end());
}

}  // namespace shieldsim
