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

#include "shieldsim/additive_outsource.hpp"

#include <string>

#include "shieldsim/error.hpp"

namespace shieldsim {

AdditiveMask::AdditiveMask(FieldMatrix r, FieldMatrix rw, std::uint64_t w_digest)
    : r_(std::move(r)), rw_(std::move(rw)), w_digest_(w_digest) {
  if (r_.rows() != rw_.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "AdditiveMask: R and RW row counts differ");
  }
}

AdditiveMask ao_offline(const FieldMatrix& w, Shape x_shape, SeededRng& rng) {
  if (x_shape.cols != w.rows()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "ao_offline: X has " + std::to_string(x_shape.cols) +
                    " columns but W has " + std::to_string(w.rows()) + " rows");
  }
  FieldMatrix r = sample_matrix(x_shape.rows, x_shape.cols, rng, w.field());
  FieldMatrix rw = mat_mul_mod(r, w);
  return AdditiveMask(std::move(r), std::move(rw), payload_digest(w.data()));
}

AdditiveMask ao_offline(Session& s, const FieldMatrix& w, Shape x_shape) {
  Session::PhaseScope offline(s, Phase::kOffline);
  AdditiveMask mask = ao_offline(w, x_shape, s.rng());
  s.count(OpKind::kMult, x_shape.rows * x_shape.cols * w.cols());
  s.count(OpKind::kAdd, x_shape.rows * (x_shape.cols - 1) * w.cols());
  return mask;
}

FieldMatrix ao_run(Session& s, const FieldMatrix& x, const FieldMatrix& w,
                   AdditiveMask& mask) {
  if (mask.used()) {
    throw Error(ErrorCode::kMaskReuse, "additive mask already consumed");
  }
  if (x.rows() != mask.r().rows() || x.cols() != mask.r().cols() ||
      x.cols() != w.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "ao_run: X, W and mask shapes disagree");
  }
  if (payload_digest(w.data()) != mask.w_digest()) {
    throw Error(ErrorCode::kInvalidArgument, "ao_run: mask was built for a different W");
  }
  mask.mark_used();

  const FieldMatrix blinded = add(x, mask.r());
  s.count(OpKind::kAdd, blinded.size());
  const FieldMatrix reply = worker_matmul(s, blinded, w);
  FieldMatrix result = sub(reply, mask.rw());
  s.count(OpKind::kAdd, result.size());
  return result;
}

}  // namespace shieldsim
