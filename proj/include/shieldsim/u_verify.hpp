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

#ifndef SHIELDSIM_U_VERIFY_HPP_
#define SHIELDSIM_U_VERIFY_HPP_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "shieldsim/additive_outsource.hpp"
#include "shieldsim/field.hpp"
#include "shieldsim/out_attn_mult.hpp"
#include "shieldsim/out_softmax.hpp"
#include "shieldsim/session.hpp"

namespace shieldsim {

// U-Verify embeds a secret linear hash of the input into the outsourced
// payload and checks one identity after recovery.

struct VerifyOutcome {
  bool pass = true;
  std::string diagnostic;  // empty on pass
  std::uint64_t trusted_mults = 0;
  std::uint64_t vecmats = 0;

  explicit operator bool() const noexcept { return pass; }
};

// ---------------------------------------------------------------------------
// Softmax (exponentiation) hash.

inline constexpr int kDefaultCoeffBound = 2;

double default_tol_log(std::size_t n) noexcept;

struct VerifyTagSoftmax {
  std::vector<int> a;  // nonzero, |a_i| <= coeff bound
  std::size_t pos = 0; // index of the hash slot in x-hat, in [0, n]
  double hash_x = 0.0; // sum a_i x_i
  double tol_log = 0.0;

  std::size_t n() const noexcept { return a.size(); }
};

struct SoftmaxTagOptions {
  int coeff_bound = kDefaultCoeffBound;
  // Draw a_i from [1, L] instead of [-L, L] \ {0}.
  bool positive = false;
  // The coefficients are redrawn while |hash_x| exceeds this, so that the
  // hash slot stays within the worker's exponent range.
  double max_abs_hash = std::numeric_limits<double>::infinity();
  int max_attempts = 256;
  double tol_log = 0.0;  // 0: default_tol_log(n)
};

struct SoftmaxPrepared {
  std::vector<double> x_hat;  // length n + 1
  VerifyTagSoftmax tag;
};

// Builds x-hat from explicit coefficients and slot. Test hook; also the core
// of the randomized versions.
SoftmaxPrepared uv_softmax_tag(std::span<const double> x, std::vector<int> a,
                               std::size_t pos, double tol_log = 0.0);

// Throws ExponentRange if no admissible coefficients were found.
SoftmaxPrepared uv_softmax_prepare(std::span<const double> x, SeededRng& rng,
                                   const SoftmaxTagOptions& opts = {});
// Counts n multiplications and n - 1 additions.
SoftmaxPrepared uv_softmax_prepare(Session& s, std::span<const double> x,
                                   const SoftmaxTagOptions& opts = {});

// mantissa * 2^exp2 with mantissa in [1, 2). Keeps long products of
// exponentials representable.
class ExtendedProduct {
 public:
  ExtendedProduct() = default;

  // Requires v > 0 and finite.
  void multiply(double v);
  double mantissa() const noexcept { return mantissa_; }
  std::int64_t exp2() const noexcept { return exp2_; }
  double log2() const;

 private:
  double mantissa_ = 1.0;
  std::int64_t exp2_ = 0;
};

// Checks prod e_i^{a_i} == e^{hash_x} and e_hash == e^{hash_x} on the log2
// scale. A non-positive or non-finite entry fails with a DegenerateValue
// diagnostic. Trusted multiplications: sum |a_i|; one reciprocal per
// negative coefficient.
VerifyOutcome uv_softmax_check(std::span<const double> e_rec,
                               const VerifyTagSoftmax& tag);
VerifyOutcome uv_softmax_check(Session& s, std::span<const double> e_rec,
                               const VerifyTagSoftmax& tag);

// x-hat with the hash slot removed.
std::vector<double> uv_softmax_strip(std::span<const double> values,
                                     const VerifyTagSoftmax& tag);

// ---------------------------------------------------------------------------
// Matmul hash row.

struct VerifyTagMatmul {
  std::vector<Residue> h;       // length m
  std::vector<Residue> hash_q;  // length n, h * Q
  std::size_t pos = 0;          // row of hash_q in Q_aug (always m)
  // (h * R_Q,top - R_Q,hash) * R_K, set by uv_matmul_attach_anchor.
  std::vector<Residue> anchor;

  std::size_t m() const noexcept { return h.size(); }
};

struct MatmulPrepared {
  FieldMatrix q_aug;  // (m + 1) x n
  VerifyTagMatmul tag;
};

MatmulPrepared uv_matmul_tag(const FieldMatrix& q, std::vector<Residue> h);
MatmulPrepared uv_matmul_prepare(const FieldMatrix& q, SeededRng& rng);
// Counts one vector-matrix product (m * n multiplications).
MatmulPrepared uv_matmul_prepare(Session& s, const FieldMatrix& q);

// Pass iff h * Z_top == z_hash. Counts one vector-matrix product.
VerifyOutcome uv_matmul_check(const FieldMatrix& z_full, const VerifyTagMatmul& tag);
VerifyOutcome uv_matmul_check(Session& s, const FieldMatrix& z_full,
                              const VerifyTagMatmul& tag);

// OutAttnMult recovers the product linearly from the reply, so a reply scaled
// by a constant yields a scaled product that still satisfies the plain hash
// identity. The anchored variant compares the unreduced recovery V against a
// value fixed offline from the masks: h * V_top - v_hash must equal
// (h * R_Q,top - R_Q,hash) * R_K. Offline cost two vector-matrix products,
// online cost one, same as the plain check.
void uv_matmul_attach_anchor(VerifyTagMatmul& tag, const AttnMaskBundle& bundle);
void uv_matmul_attach_anchor(Session& s, VerifyTagMatmul& tag,
                             const AttnMaskBundle& bundle);
VerifyOutcome uv_matmul_check_anchored(const FieldMatrix& v_full,
                                       const VerifyTagMatmul& tag);
VerifyOutcome uv_matmul_check_anchored(Session& s, const FieldMatrix& v_full,
                                       const VerifyTagMatmul& tag);

// Baseline: s uniform over F^m, Pass iff s * Z == (s * Q) * KT. Three
// vector-matrix products.
VerifyOutcome freivalds_check(const FieldMatrix& q, const FieldMatrix& kt,
                              const FieldMatrix& z, SeededRng& rng);
VerifyOutcome freivalds_check(Session& s, const FieldMatrix& q,
                              const FieldMatrix& kt, const FieldMatrix& z);

// ---------------------------------------------------------------------------
// Protocol compositions. Each records its outcome in the session's
// verification log under the current stage; none of them throws on Fail.

struct VerifiedMatrix {
  FieldMatrix value;
  VerifyOutcome outcome;
};

// X * W via additive outsourcing with a hash row appended to X.
VerifiedMatrix verified_additive(Session& s, const FieldMatrix& x,
                                 const FieldMatrix& w);

struct AttnVerifyOptions {
  OamOptions oam;
  bool anchored = true;
};

// Q * KT via OutAttnMult with the hash row hidden among the blinded rows.
VerifiedMatrix verified_attn_matmul(Session& s, const FieldMatrix& q,
                                    const FieldMatrix& kt,
                                    const AttnVerifyOptions& opts = {});

struct VerifiedSoftmax {
  SoftmaxResult result;
  VerifyOutcome outcome;
  VerifyTagSoftmax tag;
};

struct VerifiedSoftmaxOptions {
  SoftmaxOptions softmax;
  SoftmaxTagOptions tag;  // max_abs_hash is tightened to exp_cap - mask_bound
};

// Stabilize, hash, mask, exponentiate at the worker, check, normalize.
VerifiedSoftmax verified_softmax(Session& s, std::span<const double> x,
                                 const VerifiedSoftmaxOptions& opts = {});

}  // namespace shieldsim

#endif  // SHIELDSIM_U_VERIFY_HPP_
