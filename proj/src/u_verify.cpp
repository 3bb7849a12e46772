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

#include "shieldsim/u_verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "shieldsim/error.hpp"

namespace shieldsim {

double default_tol_log(std::size_t n) noexcept {
  return 1e-7 + 1e-9 * static_cast<double>(n);
}

// ---------------------------------------------------------------------------
// Softmax hash

SoftmaxPrepared uv_softmax_tag(std::span<const double> x, std::vector<int> a,
                               std::size_t pos, double tol_log) {
  if (x.empty()) throw Error(ErrorCode::kInvalidArgument, "softmax tag: empty input");
  if (a.size() != x.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "softmax tag: coefficient count differs");
  }
  if (pos > x.size()) {
    throw Error(ErrorCode::kInvalidArgument, "softmax tag: hash slot out of range");
  }
  SoftmaxPrepared out;
  double h = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (a[i] == 0) throw Error(ErrorCode::kInvalidArgument, "softmax tag: zero coefficient");
    h += a[i] * x[i];
  }
  out.x_hat.reserve(x.size() + 1);
  out.x_hat.insert(out.x_hat.end(), x.begin(), x.begin() + pos);
  out.x_hat.push_back(h);
  out.x_hat.insert(out.x_hat.end(), x.begin() + pos, x.end());
  out.tag.a = std::move(a);
  out.tag.pos = pos;
  out.tag.hash_x = h;
  out.tag.tol_log = tol_log > 0.0 ? tol_log : default_tol_log(x.size());
  return out;
}

SoftmaxPrepared uv_softmax_prepare(std::span<const double> x, SeededRng& rng,
                                   const SoftmaxTagOptions& opts) {
  if (x.empty()) throw Error(ErrorCode::kInvalidArgument, "softmax tag: empty input");
  if (opts.coeff_bound < 1) {
    throw Error(ErrorCode::kInvalidArgument, "softmax tag: coefficient bound must be >= 1");
  }
  const auto bound = static_cast<std::uint64_t>(opts.coeff_bound);
  std::vector<int> a(x.size());
  for (int attempt = 0; attempt < std::max(opts.max_attempts, 1); ++attempt) {
    double h = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (opts.positive) {
        a[i] = static_cast<int>(rng.uniform_below(bound)) + 1;
      } else {
        int v = static_cast<int>(rng.uniform_below(2 * bound)) - opts.coeff_bound;
        a[i] = v >= 0 ? v + 1 : v;
      }
      h += a[i] * x[i];
    }
    if (std::abs(h) <= opts.max_abs_hash) {
      const std::size_t pos = rng.uniform_below(x.size() + 1);
      return uv_softmax_tag(x, std::move(a), pos, opts.tol_log);
    }
  }
  std::ostringstream os;
  os << "softmax tag: no coefficients with |hashX| <= " << opts.max_abs_hash
     << " after " << opts.max_attempts << " attempts";
  throw Error(ErrorCode::kExponentRange, os.str());
}

SoftmaxPrepared uv_softmax_prepare(Session& s, std::span<const double> x,
                                   const SoftmaxTagOptions& opts) {
  SoftmaxPrepared out = uv_softmax_prepare(x, s.rng(), opts);
  s.count(OpKind::kMult, x.size());
  s.count(OpKind::kAdd, x.size() - 1);
  return out;
}

void ExtendedProduct::multiply(double v) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::kDegenerateValue, "ExtendedProduct: factor must be positive and finite");
  }
  int ev = 0;
  const double fv = std::frexp(v, &ev);  // [0.5, 1)
  mantissa_ *= 2.0 * fv;
  exp2_ += ev - 1;
  int em = 0;
  const double fm = std::frexp(mantissa_, &em);
  mantissa_ = 2.0 * fm;
  exp2_ += em - 1;
}

double ExtendedProduct::log2() const {
  return std::log2(mantissa_) + static_cast<double>(exp2_);
}

namespace {

VerifyOutcome fail(std::string why, std::uint64_t mults = 0) {
  VerifyOutcome o;
  o.pass = false;
  o.diagnostic = std::move(why);
  o.trusted_mults = mults;
  return o;
}

struct SoftmaxCheckCost {
  std::uint64_t mults = 0;
  std::uint64_t recips = 0;
};

VerifyOutcome softmax_check_impl(std::span<const double> e_rec,
                                 const VerifyTagSoftmax& tag, SoftmaxCheckCost& cost) {
  const std::size_t n = tag.n();
  if (e_rec.size() != n + 1) {
    throw Error(ErrorCode::kDimensionMismatch, "uv_softmax_check: expected n + 1 values");
  }
  for (std::size_t i = 0; i < e_rec.size(); ++i) {
    if (!(e_rec[i] > 0.0) || !std::isfinite(e_rec[i])) {
      std::ostringstream os;
      os << error_code_name(ErrorCode::kDegenerateValue) << ": recovered exponential " << i
         << " is " << e_rec[i];
      return fail(os.str());
    }
  }
  const double e_hash = e_rec[tag.pos];
  ExtendedProduct lhs;
  std::size_t j = 0;
  for (std::size_t i = 0; i <= n; ++i) {
    if (i == tag.pos) continue;
    const int ai = tag.a[j++];
    double base = e_rec[i];
    if (ai < 0) {
      base = 1.0 / base;
      ++cost.recips;
    }
    const int reps = ai < 0 ? -ai : ai;
    for (int r = 0; r < reps; ++r) lhs.multiply(base);
    cost.mults += static_cast<std::uint64_t>(reps);
  }
  const double target = tag.hash_x * std::numbers::log2e;
  const double d_prod = std::abs(lhs.log2() - target);
  const double d_hash = std::abs(std::log2(e_hash) - target);
  VerifyOutcome o;
  o.trusted_mults = cost.mults;
  if (d_prod > tag.tol_log || d_hash > tag.tol_log) {
    std::ostringstream os;
    os.precision(6);
    os << "softmax hash mismatch: |log2 prod - hashX/ln2| = " << d_prod
       << ", |log2 e_hash - hashX/ln2| = " << d_hash << ", tol = " << tag.tol_log;
    return fail(os.str(), cost.mults);
  }
  return o;
}

}  // namespace

VerifyOutcome uv_softmax_check(std::span<const double> e_rec,
                               const VerifyTagSoftmax& tag) {
  SoftmaxCheckCost cost;
  return softmax_check_impl(e_rec, tag, cost);
}

VerifyOutcome uv_softmax_check(Session& s, std::span<const double> e_rec,
                               const VerifyTagSoftmax& tag) {
  SoftmaxCheckCost cost;
  VerifyOutcome o = softmax_check_impl(e_rec, tag, cost);
  s.count(OpKind::kMult, cost.mults);
  s.count(OpKind::kDiv, cost.recips);
  s.count(OpKind::kCmp, 2);
  return o;
}

std::vector<double> uv_softmax_strip(std::span<const double> values,
                                     const VerifyTagSoftmax& tag) {
  if (values.size() != tag.n() + 1) {
    throw Error(ErrorCode::kDimensionMismatch, "uv_softmax_strip: expected n + 1 values");
  }
  std::vector<double> out;
  out.reserve(tag.n());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i != tag.pos) out.push_back(values[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Matmul hash row

MatmulPrepared uv_matmul_tag(const FieldMatrix& q, std::vector<Residue> h) {
  if (q.rows() == 0) throw Error(ErrorCode::kInvalidArgument, "matmul tag: Q has no rows");
  if (h.size() != q.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "matmul tag: h length differs from Q rows");
  }
  const FieldConfig& f = q.field();
  for (Residue& v : h) {
    if (v >= f.p()) throw Error(ErrorCode::kInvalidArgument, "matmul tag: unreduced h");
  }
  std::vector<Residue> hq = vec_mat_mod(h, q);
  MatmulPrepared out{vstack(q, FieldMatrix(1, q.cols(), hq, f)), {}};
  out.tag.h = std::move(h);
  out.tag.hash_q = std::move(hq);
  out.tag.pos = q.rows();
  return out;
}

MatmulPrepared uv_matmul_prepare(const FieldMatrix& q, SeededRng& rng) {
  std::vector<Residue> h(q.rows());
  for (Residue& v : h) v = sample_residue(rng, q.field());
  return uv_matmul_tag(q, std::move(h));
}

MatmulPrepared uv_matmul_prepare(Session& s, const FieldMatrix& q) {
  MatmulPrepared out = uv_matmul_prepare(q, s.rng());
  s.count(OpKind::kMult, q.rows() * q.cols());
  s.count(OpKind::kVecMat, 1);
  return out;
}

namespace {

void require_aug_shape(const FieldMatrix& z, const VerifyTagMatmul& tag,
                       const char* who) {
  if (z.rows() != tag.m() + 1 || tag.pos != tag.m()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(who) + ": expected " + std::to_string(tag.m() + 1) +
                    " rows, got " + std::to_string(z.rows()));
  }
}

// h * Z_top - Z[pos].
std::vector<Residue> hash_residual(const FieldMatrix& z, const VerifyTagMatmul& tag) {
  const FieldMatrix top = z.row_block(0, tag.m());
  std::vector<Residue> lhs = vec_mat_mod(tag.h, top);
  const FieldConfig& f = z.field();
  const auto zh = z.row(tag.pos);
  for (std::size_t j = 0; j < lhs.size(); ++j) lhs[j] = f.sub(lhs[j], zh[j]);
  return lhs;
}

VerifyOutcome compare_rows(std::span<const Residue> got, std::span<const Residue> want,
                           std::uint64_t mults, const char* what) {
  for (std::size_t j = 0; j < got.size(); ++j) {
    if (got[j] != want[j]) {
      VerifyOutcome o = fail(std::string(what) + " mismatch at column " + std::to_string(j), mults);
      o.vecmats = 1;
      return o;
    }
  }
  VerifyOutcome o;
  o.trusted_mults = mults;
  o.vecmats = 1;
  return o;
}

}  // namespace

VerifyOutcome uv_matmul_check(const FieldMatrix& z_full, const VerifyTagMatmul& tag) {
  require_aug_shape(z_full, tag, "uv_matmul_check");
  const std::vector<Residue> r = hash_residual(z_full, tag);
  const std::vector<Residue> zero(r.size(), 0);
  return compare_rows(r, zero, tag.m() * z_full.cols(), "hash row");
}

VerifyOutcome uv_matmul_check(Session& s, const FieldMatrix& z_full,
                              const VerifyTagMatmul& tag) {
  VerifyOutcome o = uv_matmul_check(z_full, tag);
  s.count(OpKind::kMult, o.trusted_mults);
  s.count(OpKind::kVecMat, 1);
  return o;
}

void uv_matmul_attach_anchor(VerifyTagMatmul& tag, const AttnMaskBundle& bundle) {
  if (bundle.m() != tag.m() + 1) {
    throw Error(ErrorCode::kDimensionMismatch,
                "uv_matmul_attach_anchor: bundle must cover the augmented Q");
  }
  std::vector<Residue> u = vec_mat_mod(tag.h, bundle.r_q.row_block(0, tag.m()));
  const FieldConfig& f = bundle.r_q.field();
  const auto r_hash = bundle.r_q.row(tag.pos);
  for (std::size_t j = 0; j < u.size(); ++j) u[j] = f.sub(u[j], r_hash[j]);
  tag.anchor = vec_mat_mod(u, bundle.r_kt);
}

void uv_matmul_attach_anchor(Session& s, VerifyTagMatmul& tag,
                             const AttnMaskBundle& bundle) {
  Session::PhaseScope offline(s, Phase::kOffline);
  uv_matmul_attach_anchor(tag, bundle);
  s.count(OpKind::kMult, tag.m() * bundle.n() + bundle.n() * bundle.k());
  s.count(OpKind::kVecMat, 2);
}

VerifyOutcome uv_matmul_check_anchored(const FieldMatrix& v_full,
                                       const VerifyTagMatmul& tag) {
  require_aug_shape(v_full, tag, "uv_matmul_check_anchored");
  if (tag.anchor.size() != v_full.cols()) {
    throw Error(ErrorCode::kInvalidArgument, "uv_matmul_check_anchored: tag has no anchor");
  }
  const std::vector<Residue> r = hash_residual(v_full, tag);
  return compare_rows(r, tag.anchor, tag.m() * v_full.cols(), "anchored hash row");
}

VerifyOutcome uv_matmul_check_anchored(Session& s, const FieldMatrix& v_full,
                                       const VerifyTagMatmul& tag) {
  VerifyOutcome o = uv_matmul_check_anchored(v_full, tag);
  s.count(OpKind::kMult, o.trusted_mults);
  s.count(OpKind::kVecMat, 1);
  return o;
}

VerifyOutcome freivalds_check(const FieldMatrix& q, const FieldMatrix& kt,
                              const FieldMatrix& z, SeededRng& rng) {
  if (q.cols() != kt.rows() || z.rows() != q.rows() || z.cols() != kt.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "freivalds_check: shapes inconsistent");
  }
  std::vector<Residue> sv(q.rows());
  for (Residue& v : sv) v = sample_residue(rng, q.field());
  const std::vector<Residue> sz = vec_mat_mod(sv, z);
  const std::vector<Residue> sq = vec_mat_mod(sv, q);
  const std::vector<Residue> sqk = vec_mat_mod(sq, kt);
  const std::uint64_t mults = q.rows() * z.cols() + q.rows() * q.cols() + kt.rows() * kt.cols();
  VerifyOutcome o = compare_rows(sz, sqk, mults, "Freivalds projection");
  o.vecmats = 3;
  return o;
}

VerifyOutcome freivalds_check(Session& s, const FieldMatrix& q,
                              const FieldMatrix& kt, const FieldMatrix& z) {
  VerifyOutcome o = freivalds_check(q, kt, z, s.rng());
  s.count(OpKind::kMult, o.trusted_mults);
  s.count(OpKind::kVecMat, 3);
  return o;
}

// ---------------------------------------------------------------------------
// Compositions

namespace {

void log_outcome(Session& s, const char* check, const VerifyOutcome& o,
                 std::uint64_t prepare_mults) {
  s.record_verification({check, s.stage(), o.pass, prepare_mults + o.trusted_mults});
}

}  // namespace

VerifiedMatrix verified_additive(Session& s, const FieldMatrix& x,
                                 const FieldMatrix& w) {
  MatmulPrepared prep = uv_matmul_prepare(s, x);
  AdditiveMask mask = ao_offline(s, w, {prep.q_aug.rows(), prep.q_aug.cols()});
  const FieldMatrix y = ao_run(s, prep.q_aug, w, mask);
  VerifyOutcome o = uv_matmul_check(s, y, prep.tag);
  log_outcome(s, "additive", o, x.rows() * x.cols());
  return {y.row_block(0, x.rows()), std::move(o)};
}

VerifiedMatrix verified_attn_matmul(Session& s, const FieldMatrix& q,
                                    const FieldMatrix& kt,
                                    const AttnVerifyOptions& opts) {
  if (q.cols() != kt.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "verified_attn_matmul: inner dimensions differ");
  }
  MatmulPrepared prep = uv_matmul_prepare(s, q);
  AttnMaskBundle bundle =
      oam_offline(s, prep.q_aug.rows(), prep.q_aug.cols(), kt.cols(), opts.oam);
  if (opts.anchored) uv_matmul_attach_anchor(s, prep.tag, bundle);
  const BlindedOperands blinded = oam_blind(s, prep.q_aug, kt, bundle);
  const FieldMatrix reply = worker_matmul(s, blinded.q_tilde, blinded.kt_tilde);
  OamRecovery rec = oam_recover_detailed(s, reply, bundle);
  VerifyOutcome o = opts.anchored ? uv_matmul_check_anchored(s, rec.unreduced, prep.tag)
                                  : uv_matmul_check(s, rec.product, prep.tag);
  log_outcome(s, "matmul", o, q.rows() * q.cols());
  return {rec.product.row_block(0, q.rows()), std::move(o)};
}

VerifiedSoftmax verified_softmax(Session& s, std::span<const double> x,
                                 const VerifiedSoftmaxOptions& opts) {
  if (x.empty()) throw Error(ErrorCode::kInvalidArgument, "verified_softmax: empty input");
  std::vector<double> input(x.begin(), x.end());
  if (opts.softmax.stabilize) input = osm_stabilize(s, input);

  SoftmaxTagOptions tag_opts = opts.tag;
  tag_opts.max_abs_hash =
      std::min(tag_opts.max_abs_hash, s.exp_cap() - opts.softmax.mask_bound);
  SoftmaxPrepared prep = uv_softmax_prepare(s, input, tag_opts);

  SoftmaxMask mask = osm_offline(s, prep.x_hat.size(), opts.softmax.mask_bound);
  const std::vector<double> e = osm_exponentials(s, prep.x_hat, mask);
  VerifyOutcome o = uv_softmax_check(s, e, prep.tag);
  log_outcome(s, "softmax", o, input.size());

  const std::vector<double> kept = uv_softmax_strip(e, prep.tag);
  return {osm_normalize(s, kept), std::move(o), std::move(prep.tag)};
}

}  // namespace shieldsim
