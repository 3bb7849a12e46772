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

#ifndef SHIELDSIM_OUT_ATTN_MULT_HPP_
#define SHIELDSIM_OUT_ATTN_MULT_HPP_

#include <cstddef>
#include <cstdint>

#include "shieldsim/field.hpp"
#include "shieldsim/session.hpp"

namespace shieldsim {

// OutAttnMult: outsourcing Q * K^T when both operands are runtime values.
//
// The trusted side blinds Q (m x n) and K^T (n x k) with fresh additive masks,
// hides scaled copies of the masks among the blinded rows/columns with secret
// permutations, and asks the worker for one (2m x n) * (n x 2k) product:
//
//   Q~   = perm_rows([Q + R_Q ; a R_Q], lambda1)
//   K^T~ = perm_cols([K^T + R_K | b R_K], lambda2)
//
// After undoing the permutations the reply has four blocks
//
//   TL = (Q + R_Q)(K^T + R_K)     TR = b (Q + R_Q) R_K
//   BL = a R_Q (K^T + R_K)        BR = ab R_Q R_K
//
// from which Q K^T = TL - Q R_K - R_Q K^T - R_Q R_K is recovered with three
// scalar unmaskings.

struct OamOptions {
  // 0: scalars uniform on [1, p). Otherwise nonzero with centered lift in
  // [-scalar_bound, scalar_bound].
  std::uint32_t scalar_bound = 0;
};

// All secrets of one OutAttnMult invocation. Single use.
struct AttnMaskBundle {
  FieldMatrix r_q;     // m x n
  FieldMatrix r_kt;    // n x k
  Residue a = 1;
  Residue b = 1;
  FieldMatrix a_r_q;   // a * R_Q
  FieldMatrix b_r_kt;  // b * R_K
  Permutation lambda1; // over 2m rows
  Permutation lambda2; // over 2k columns
  Residue inv_a = 1;
  Residue inv_b = 1;
  Residue inv_ab = 1;
  bool used = false;

  std::size_t m() const noexcept { return r_q.rows(); }
  std::size_t n() const noexcept { return r_q.cols(); }
  std::size_t k() const noexcept { return r_kt.cols(); }

  // Assembles a bundle from explicit secrets (derived fields are computed).
  // Intended for degenerate-mask tests.
  static AttnMaskBundle from_parts(FieldMatrix r_q, FieldMatrix r_kt, Residue a,
                                   Residue b, Permutation lambda1,
                                   Permutation lambda2);
};

AttnMaskBundle oam_offline(std::size_t m, std::size_t n, std::size_t k,
                           SeededRng& rng, const FieldConfig& cfg,
                           const OamOptions& opts = {});
// Same, drawing from the session's RNG and counting the two scalar-mask
// products (mn + nk multiplications) and three inversions as offline work.
AttnMaskBundle oam_offline(Session& s, std::size_t m, std::size_t n,
                           std::size_t k, const OamOptions& opts = {});

struct BlindedOperands {
  FieldMatrix q_tilde;   // 2m x n
  FieldMatrix kt_tilde;  // n x 2k
};

// Marks the bundle used; throws MaskReuse if it already was.
BlindedOperands oam_blind(const FieldMatrix& q, const FieldMatrix& kt,
                          AttnMaskBundle& bundle);
BlindedOperands oam_blind(Session& s, const FieldMatrix& q, const FieldMatrix& kt,
                          AttnMaskBundle& bundle);

struct OamRecovery {
  FieldMatrix product;   // Q K^T
  // TL - Q R_K - R_Q K^T, i.e. the product before the final R_Q R_K
  // subtraction. Equals Q K^T + R_Q R_K for an honest worker; the anchored
  // integrity check reads it.
  FieldMatrix unreduced;
};

FieldMatrix oam_recover(const FieldMatrix& w_tilde, const AttnMaskBundle& bundle);
OamRecovery oam_recover_detailed(const FieldMatrix& w_tilde,
                                 const AttnMaskBundle& bundle);
// Counts 3mk multiplications and 5mk additions.
OamRecovery oam_recover_detailed(Session& s, const FieldMatrix& w_tilde,
                                 const AttnMaskBundle& bundle);

// offline -> blind -> worker_matmul -> recover.
FieldMatrix oam_run(Session& s, const FieldMatrix& q, const FieldMatrix& kt,
                    const OamOptions& opts = {});

}  // namespace shieldsim

#endif  // SHIELDSIM_OUT_ATTN_MULT_HPP_
