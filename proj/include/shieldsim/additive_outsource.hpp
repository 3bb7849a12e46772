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

#ifndef SHIELDSIM_ADDITIVE_OUTSOURCE_HPP_
#define SHIELDSIM_ADDITIVE_OUTSOURCE_HPP_

#include <cstddef>
#include <cstdint>

#include "shieldsim/field.hpp"
#include "shieldsim/session.hpp"

namespace shieldsim {

struct Shape {
  std::size_t rows = 0;
  std::size_t cols = 0;
};

// One-time mask for outsourcing X * W with a constant W: the worker sees
// X + R and the trusted side removes the precomputed R * W.
class AdditiveMask {
 public:
  // Builds a mask from explicit parts; `w_digest` ties it to one W. Intended
  // for tests and degenerate-mask experiments.
  AdditiveMask(FieldMatrix r, FieldMatrix rw, std::uint64_t w_digest);

  const FieldMatrix& r() const noexcept { return r_; }
  const FieldMatrix& rw() const noexcept { return rw_; }
  std::uint64_t w_digest() const noexcept { return w_digest_; }
  bool used() const noexcept { return used_; }
  void mark_used() noexcept { used_ = true; }

 private:
  FieldMatrix r_;
  FieldMatrix rw_;
  std::uint64_t w_digest_;
  bool used_ = false;
};

// Samples R (shape x_shape) and precomputes R * W. Counted as offline trusted
// work when a session is supplied.
AdditiveMask ao_offline(const FieldMatrix& w, Shape x_shape, SeededRng& rng);
AdditiveMask ao_offline(Session& s, const FieldMatrix& w, Shape x_shape);

// Returns X * W mod p. The worker sees X + R only. Throws MaskReuse if the
// mask was already consumed and InvalidArgument if it was built for another W.
FieldMatrix ao_run(Session& s, const FieldMatrix& x, const FieldMatrix& w,
                   AdditiveMask& mask);

}  // namespace shieldsim

#endif  // SHIELDSIM_ADDITIVE_OUTSOURCE_HPP_
