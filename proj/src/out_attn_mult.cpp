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

#include "shieldsim/out_attn_mult.hpp"

#include <string>

#include "shieldsim/error.hpp"

namespace shieldsim {

namespace {

Residue draw_scalar(SeededRng& rng, const FieldConfig& cfg, const OamOptions& opts) {
  return opts.scalar_bound == 0 ? sample_scalar_nonzero(rng, cfg)
                                : sample_scalar_bounded(rng, opts.scalar_bound, cfg);
}

}  // namespace

AttnMaskBundle AttnMaskBundle::from_parts(FieldMatrix r_q, FieldMatrix r_kt,
                                          Residue a, Residue b,
                                          Permutation lambda1,
                                          Permutation lambda2) {
  if (r_q.cols() != r_kt.rows() || lambda1.size() != 2 * r_q.rows() ||
      lambda2.size() != 2 * r_kt.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "AttnMaskBundle: inconsistent shapes");
  }
  const FieldConfig cfg = r_q.field();
  AttnMaskBundle out{
      .r_q = r_q,
      .r_kt = r_kt,
      .a = a,
      .b = b,
      .a_r_q = scale(r_q, a),
      .b_r_kt = scale(r_kt, b),
      .lambda1 = std::move(lambda1),
      .lambda2 = std::move(lambda2),
      .inv_a = mod_inv(a, cfg),
      .inv_b = mod_inv(b, cfg),
  };
  out.inv_ab = cfg.mul(out.inv_a, out.inv_b);
  return out;
}

AttnMaskBundle oam_offline(std::size_t m, std::size_t n, std::size_t k,
                           SeededRng& rng, const FieldConfig& cfg,
                           const OamOptions& opts) {
  if (m == 0 || n == 0 || k == 0) {
    throw Error(ErrorCode::kInvalidArgument, "oam_offline: dimensions must be >= 1");
  }
  FieldMatrix r_q = sample_matrix(m, n, rng, cfg);
  FieldMatrix r_kt = sample_matrix(n, k, rng, cfg);
  const Residue a = draw_scalar(rng, cfg, opts);
  const Residue b = draw_scalar(rng, cfg, opts);
  Permutation l1 = sample_permutation(2 * m, rng);
  Permutation l2 = sample_permutation(2 * k, rng);
  return AttnMaskBundle::from_parts(std::move(r_q), std::move(r_kt), a, b,
                                    std::move(l1), std::move(l2));
}

AttnMaskBundle oam_offline(Session& s, std::size_t m, std::size_t n,
                           std::size_t k, const OamOptions& opts) {
  Session::PhaseScope offline(s, Phase::kOffline);
  AttnMaskBundle bundle = oam_offline(m, n, k, s.rng(), s.field(), opts);
  s.count(OpKind::kMult, m * n + n * k);
  s.count(OpKind::kDiv, 3);
  return bundle;
}

BlindedOperands oam_blind(const FieldMatrix& q, const FieldMatrix& kt,
                          AttnMaskBundle& bundle) {
  if (q.rows() != bundle.m() || q.cols() != bundle.n() ||
      kt.rows() != bundle.n() || kt.cols() != bundle.k()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "oam_blind: operands " + std::to_string(q.rows()) + "x" +
                    std::to_string(q.cols()) + ", " + std::to_string(kt.rows()) +
                    "x" + std::to_string(kt.cols()) + " do not match the bundle");
  }
  if (bundle.used) {
    throw Error(ErrorCode::kMaskReuse, "OutAttnMult mask bundle already consumed");
  }
  bundle.used = true;
  return {
      perm_rows(vstack(add(q, bundle.r_q), bundle.a_r_q), bundle.lambda1),
      perm_cols(hstack(add(kt, bundle.r_kt), bundle.b_r_kt), bundle.lambda2),
  };
}

BlindedOperands oam_blind(Session& s, const FieldMatrix& q, const FieldMatrix& kt,
                          AttnMaskBundle& bundle) {
  BlindedOperands out = oam_blind(q, kt, bundle);
  s.count(OpKind::kAdd, q.size() + kt.size());
  return out;
}

OamRecovery oam_recover_detailed(const FieldMatrix& w_tilde,
                                 const AttnMaskBundle& bundle) {
  const std::size_t m = bundle.m(), k = bundle.k();
  if (w_tilde.rows() != 2 * m || w_tilde.cols() != 2 * k) {
    throw Error(ErrorCode::kDimensionMismatch,
                "oam_recover: reply is " + std::to_string(w_tilde.rows()) + "x" +
                    std::to_string(w_tilde.cols()) + ", expected " +
                    std::to_string(2 * m) + "x" + std::to_string(2 * k));
  }
  const FieldMatrix w = perm_cols(perm_rows(w_tilde, bundle.lambda1.inverse()),
                                  bundle.lambda2.inverse());
  const FieldConfig& f = w.field();
  OamRecovery out{FieldMatrix(m, k, f), FieldMatrix(m, k, f)};
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const Residue tl = w(i, j);
      const Residue tr = w(i, k + j);
      const Residue bl = w(m + i, j);
      const Residue br = w(m + i, k + j);
      const Residue rr = f.mul(bundle.inv_ab, br);            // R_Q R_K
      const Residue qr = f.sub(f.mul(bundle.inv_b, tr), rr);  // Q R_K
      const Residue rq = f.sub(f.mul(bundle.inv_a, bl), rr);  // R_Q K^T
      const Residue v = f.sub(f.sub(tl, qr), rq);
      out.unreduced(i, j) = v;
      out.product(i, j) = f.sub(v, rr);
    }
  }
  return out;
}

FieldMatrix oam_recover(const FieldMatrix& w_tilde, const AttnMaskBundle& bundle) {
  return oam_recover_detailed(w_tilde, bundle).product;
}

OamRecovery oam_recover_detailed(Session& s, const FieldMatrix& w_tilde,
                                 const AttnMaskBundle& bundle) {
  OamRecovery out = oam_recover_detailed(w_tilde, bundle);
  const std::uint64_t mk = bundle.m() * bundle.k();
  s.count(OpKind::kMult, 3 * mk);
  s.count(OpKind::kAdd, 5 * mk);
  return out;
}

FieldMatrix oam_run(Session& s, const FieldMatrix& q, const FieldMatrix& kt,
                    const OamOptions& opts) {
  if (q.cols() != kt.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "oam_run: inner dimensions differ");
  }
  AttnMaskBundle bundle = oam_offline(s, q.rows(), q.cols(), kt.cols(), opts);
  const BlindedOperands blinded = oam_blind(s, q, kt, bundle);
  const FieldMatrix reply = worker_matmul(s, blinded.q_tilde, blinded.kt_tilde);
  return oam_recover_detailed(s, reply, bundle).product;
}

}  // namespace shieldsim
