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

// Independent reference implementations used as test oracles. Nothing here
// calls into the library's arithmetic.

#ifndef SHIELDSIM_TESTS_ORACLE_HPP_
#define SHIELDSIM_TESTS_ORACLE_HPP_

#include <cmath>
#include <cstdint>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace oracle {

using Mat = std::vector<std::vector<std::uint64_t>>;

// Schoolbook product with exact 128-bit accumulation, reduced once.
inline Mat matmul(const Mat& a, const Mat& b, std::uint64_t p) {
  const std::size_t m = a.size(), n = b.size(), k = b.empty() ? 0 : b[0].size();
  Mat c(m, std::vector<std::uint64_t>(k, 0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      unsigned __int128 acc = 0;
      for (std::size_t t = 0; t < n; ++t) acc += static_cast<unsigned __int128>(a[i][t]) * b[t][j];
      c[i][j] = static_cast<std::uint64_t>(acc % p);
    }
  }
  return c;
}

// Extended Euclid on signed 128-bit values.
inline std::uint64_t inverse(std::uint64_t x, std::uint64_t p) {
  __int128 r0 = p, r1 = x % p, s0 = 0, s1 = 1;
  while (r1 != 0) {
    const __int128 q = r0 / r1;
    const __int128 r2 = r0 - q * r1;
    r0 = r1;
    r1 = r2;
    const __int128 s2 = s0 - q * s1;
    s0 = s1;
    s1 = s2;
  }
  __int128 v = s0 % static_cast<__int128>(p);
  if (v < 0) v += p;
  return static_cast<std::uint64_t>(v);
}

// Upper-tail p-value of Pearson's statistic for equiprobable bins.
inline double chi_square_pvalue(const std::vector<std::uint64_t>& counts) {
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
  double stat = 0.0;
  for (auto c : counts) {
    const double d = static_cast<double>(c) - expected;
    stat += d * d / expected;
  }
  boost::math::chi_squared dist(static_cast<double>(counts.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

inline std::vector<double> softmax(const std::vector<double>& x) {
  long double mx = x[0];
  for (double v : x) mx = std::max<long double>(mx, v);
  long double sum = 0;
  std::vector<long double> e(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    e[i] = std::exp(static_cast<long double>(x[i]) - mx);
    sum += e[i];
  }
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = static_cast<double>(e[i] / sum);
  return out;
}

}  // namespace oracle

#endif  // SHIELDSIM_TESTS_ORACLE_HPP_
