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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "oracle.hpp"
#include "shieldsim/error.hpp"
#include "shieldsim/u_verify.hpp"

using namespace shieldsim;

namespace {

Session adversarial(const std::string& spec, std::uint64_t seed) {
  SessionOptions o;
  o.seed = seed;
  o.adversary = AdversaryStrategy::parse(spec);
  return Session(o);
}

std::vector<double> exps(const std::vector<double>& v) {
  std::vector<double> e(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) e[i] = std::exp(v[i]);
  return e;
}

}  // namespace

// --- softmax hash ---------------------------------------------------------

TEST(SoftmaxTag, HashExamples) {
  EXPECT_DOUBLE_EQ(uv_softmax_tag(std::vector<double>{1, 2, 3}, {1, 1, 1}, 0).tag.hash_x, 6.0);
  EXPECT_DOUBLE_EQ(uv_softmax_tag(std::vector<double>{3, 4}, {2, -1}, 0).tag.hash_x, 2.0);
}

TEST(SoftmaxTag, SlotInsertion) {
  const SoftmaxPrepared p = uv_softmax_tag(std::vector<double>{3, 4}, {2, -1}, 1);
  EXPECT_EQ(p.x_hat, (std::vector<double>{3, 2, 4}));
  EXPECT_EQ(uv_softmax_strip(p.x_hat, p.tag), (std::vector<double>{3, 4}));
  EXPECT_THROW(uv_softmax_tag(std::vector<double>{3, 4}, {2, 0}, 1), Error);
  EXPECT_THROW(uv_softmax_tag(std::vector<double>{3, 4}, {2, 1}, 3), Error);
}

TEST(SoftmaxPrepare, CoefficientsSignedNonzeroBounded) {
  SeededRng rng(1);
  std::vector<int> seen(5, 0);
  for (int t = 0; t < 200; ++t) {
    const auto p = uv_softmax_prepare(std::vector<double>(8, 0.5), rng);
    for (int a : p.tag.a) {
      ASSERT_NE(a, 0);
      ASSERT_LE(std::abs(a), 2);
      ++seen[a + 2];
    }
  }
  EXPECT_GT(seen[0], 0);
  EXPECT_GT(seen[1], 0);
  EXPECT_GT(seen[3], 0);
  EXPECT_GT(seen[4], 0);
}

TEST(SoftmaxPrepare, SlotUniform) {
  const std::size_t n = 7;
  std::vector<std::uint64_t> bins(n + 1, 0);
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    SeededRng rng(seed);
    ++bins[uv_softmax_prepare(std::vector<double>(n, 0.0), rng).tag.pos];
  }
  EXPECT_GT(oracle::chi_square_pvalue(bins), 0.001);
}

TEST(SoftmaxPrepare, CountsAndHashBound) {
  Session s;
  const std::vector<double> x(16, 30.0);
  SoftmaxTagOptions o;
  o.max_abs_hash = 100.0;
  const auto p = uv_softmax_prepare(s, x, o);
  EXPECT_LE(std::abs(p.tag.hash_x), 100.0);
  EXPECT_EQ(s.snapshot_counts().online.trusted_mults, 16u);
  EXPECT_EQ(s.snapshot_counts().online.trusted_adds, 15u);
}

TEST(SoftmaxPrepare, ImpossibleBoundThrows) {
  SeededRng rng(2);
  SoftmaxTagOptions o;
  o.max_abs_hash = 10.0;
  try {
    uv_softmax_prepare(std::vector<double>{100.0}, rng, o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kExponentRange);
  }
}

TEST(ExtendedProduct, StaysExactInLog) {
  ExtendedProduct p;
  long double ref = 0;
  for (int i = 0; i < 5000; ++i) {
    const double v = std::exp(400.0 + (i % 7));
    p.multiply(v);
    ref += std::log2(static_cast<long double>(v));
  }
  EXPECT_NEAR(p.log2(), static_cast<double>(ref), 1e-6);
  EXPECT_GE(p.mantissa(), 1.0);
  EXPECT_LT(p.mantissa(), 2.0);
  EXPECT_THROW(p.multiply(0.0), Error);
}

TEST(SoftmaxCheck, HonestPassesAndCounts) {
  const std::vector<double> x{0.5, -1.25, 2.0, 0.0};
  const SoftmaxPrepared p = uv_softmax_tag(x, {2, -1, 1, -2}, 2);
  Session s;
  const VerifyOutcome o = uv_softmax_check(s, exps(p.x_hat), p.tag);
  EXPECT_TRUE(o.pass) << o.diagnostic;
  EXPECT_EQ(o.trusted_mults, 6u);
  EXPECT_EQ(s.snapshot_counts().online.trusted_divs, 2u);
  EXPECT_EQ(s.snapshot_counts().online.trusted_exps, 0u);
}

TEST(SoftmaxCheck, MultiplicationBound) {
  // sum |a_i| never exceeds n (L - 1) + n.
  SeededRng rng(4);
  for (int t = 0; t < 100; ++t) {
    const auto p = uv_softmax_prepare(std::vector<double>(32, 0.1), rng);
    const VerifyOutcome o = uv_softmax_check(exps(p.x_hat), p.tag);
    EXPECT_TRUE(o.pass);
    EXPECT_LE(o.trusted_mults, 32u * (2 - 1) + 32u);
  }
}

TEST(SoftmaxCheck, DetectsTamperedEntry) {
  const std::vector<double> x{0.5, -1.25, 2.0};
  const SoftmaxPrepared p = uv_softmax_tag(x, {1, 2, -1}, 0);
  auto e = exps(p.x_hat);
  e[2] *= std::exp(1e-4);
  EXPECT_FALSE(uv_softmax_check(e, p.tag).pass);
  auto h = exps(p.x_hat);
  h[0] *= 1.001;  // the hash slot alone
  EXPECT_FALSE(uv_softmax_check(h, p.tag).pass);
}

TEST(SoftmaxCheck, DegenerateValuesFail) {
  const SoftmaxPrepared p = uv_softmax_tag(std::vector<double>{1.0, 2.0}, {1, 1}, 0);
  auto e = exps(p.x_hat);
  e[1] = -1.0;
  VerifyOutcome o = uv_softmax_check(e, p.tag);
  EXPECT_FALSE(o.pass);
  EXPECT_NE(o.diagnostic.find("DegenerateValue"), std::string::npos) << o.diagnostic;
  e[1] = std::nan("");
  EXPECT_FALSE(uv_softmax_check(e, p.tag).pass);
}

TEST(SoftmaxCheck, HonestFalsePositivesAtLength512) {
  int failures = 0;
  for (int t = 0; t < 500; ++t) {
    SessionOptions o;
    o.seed = SeededRng::derive(99, t);
    Session s(o);
    std::vector<double> x(512);
    for (double& v : x) v = s.rng().uniform_real(-10, 10);
    failures += !verified_softmax(s, x).outcome.pass;
  }
  EXPECT_EQ(failures, 0);
}

TEST(VerifiedSoftmax, HonestRoundTrip) {
  Session s;
  std::vector<double> x(64);
  for (double& v : x) v = s.rng().uniform_real(-10, 10);
  const VerifiedSoftmax r = verified_softmax(s, x);
  EXPECT_TRUE(r.outcome.pass);
  const auto ref = oracle::softmax(x);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(r.result.probs[i], ref[i], 1e-9);
  ASSERT_EQ(s.verifications().size(), 1u);
  EXPECT_EQ(s.verifications()[0].check, "softmax");
  EXPECT_EQ(s.snapshot_counts().online.trusted_exps, 0u);
}

TEST(VerifiedSoftmax, AttackADetected) {
  int detected = 0;
  for (int t = 0; t < 1000; ++t) {
    Session s = adversarial("softmax-a:0.01", SeededRng::derive(3, t));
    std::vector<double> x(64);
    for (double& v : x) v = s.rng().uniform_real(-10, 10);
    detected += !verified_softmax(s, x).outcome.pass;
  }
  EXPECT_GE(detected, 999);
}

TEST(VerifiedSoftmax, SwapDetectedWhenCoefficientsDiffer) {
  int counted = 0, detected = 0;
  for (int t = 0; t < 600; ++t) {
    Session s = adversarial("softmax-swap:0,1", SeededRng::derive(4, t));
    std::vector<double> x(16);
    for (double& v : x) v = s.rng().uniform_real(-10, 10);
    const VerifiedSoftmax r = verified_softmax(s, x);
    // Positions 0 and 1 of x-hat, mapped back to coefficient indices.
    auto coeff = [&](std::size_t i) -> int {
      if (i == r.tag.pos) return 0;  // hash slot
      return r.tag.a[i < r.tag.pos ? i : i - 1];
    };
    if (coeff(0) == coeff(1)) continue;
    ++counted;
    detected += !r.outcome.pass;
  }
  EXPECT_GT(counted, 300);
  EXPECT_EQ(detected, counted);
}

// --- matmul hash row ------------------------------------------------------

TEST(MatmulTag, Examples) {
  const FieldConfig f;
  SeededRng rng(1);
  const FieldMatrix q = sample_matrix(3, 2, rng, f);
  const MatmulPrepared e1 = uv_matmul_tag(q, {1, 0, 0});
  EXPECT_EQ(e1.tag.hash_q, std::vector<Residue>(q.row(0).begin(), q.row(0).end()));
  const std::vector<Residue> h{4, 9, 16};
  EXPECT_EQ(uv_matmul_tag(FieldMatrix::identity(3, f), h).tag.hash_q, h);
  // Oracle: explicit dot products in 128-bit.
  const MatmulPrepared r = uv_matmul_tag(q, h);
  for (std::size_t c = 0; c < 2; ++c) {
    unsigned __int128 acc = 0;
    for (std::size_t i = 0; i < 3; ++i) acc += static_cast<unsigned __int128>(h[i]) * q(i, c);
    EXPECT_EQ(r.tag.hash_q[c], static_cast<Residue>(acc % f.p()));
  }
  EXPECT_EQ(r.q_aug.rows(), 4u);
  EXPECT_EQ(r.q_aug.row_block(0, 3), q);
}

TEST(MatmulCheck, DirectProductPasses) {
  Session s;
  const FieldMatrix q = sample_matrix(5, 4, s.rng(), s.field());
  const FieldMatrix kt = sample_matrix(4, 6, s.rng(), s.field());
  const MatmulPrepared p = uv_matmul_prepare(s, q);
  const VerifyOutcome o = uv_matmul_check(s, mat_mul_mod(p.q_aug, kt), p.tag);
  EXPECT_TRUE(o.pass);
  EXPECT_EQ(s.snapshot_counts().online.trusted_vecmats, 2u);
}

TEST(MatmulCheck, VersusFreivaldsCost) {
  Session a, b;
  const FieldMatrix q = sample_matrix(8, 8, a.rng(), a.field());
  const FieldMatrix kt = sample_matrix(8, 8, a.rng(), a.field());
  const MatmulPrepared p = uv_matmul_prepare(a, q);
  EXPECT_TRUE(uv_matmul_check(a, mat_mul_mod(p.q_aug, kt), p.tag).pass);
  EXPECT_TRUE(freivalds_check(b, q, kt, mat_mul_mod(q, kt)).pass);
  EXPECT_EQ(a.snapshot_counts().online.trusted_vecmats, 2u);
  EXPECT_EQ(b.snapshot_counts().online.trusted_vecmats, 3u);
  EXPECT_EQ(a.snapshot_counts().online.trusted_mults * 3, b.snapshot_counts().online.trusted_mults * 2);
}

TEST(Freivalds, CatchesSingleEntryError) {
  const FieldConfig f;
  SeededRng rng(8);
  int detected = 0;
  for (int t = 0; t < 2000; ++t) {
    const FieldMatrix q = sample_matrix(4, 4, rng, f), kt = sample_matrix(4, 4, rng, f);
    FieldMatrix z = mat_mul_mod(q, kt);
    const std::size_t i = rng.uniform_below(4), j = rng.uniform_below(4);
    z(i, j) = f.add(z(i, j), 1);
    detected += !freivalds_check(q, kt, z, rng).pass;
  }
  EXPECT_GE(detected, 1998);
}

TEST(VerifiedAttnMatmul, HonestExactAndLogged) {
  Session s;
  const FieldMatrix q = sample_matrix(6, 5, s.rng(), s.field());
  const FieldMatrix kt = sample_matrix(5, 7, s.rng(), s.field());
  const VerifiedMatrix r = verified_attn_matmul(s, q, kt);
  EXPECT_TRUE(r.outcome.pass);
  EXPECT_EQ(r.value, mat_mul_mod(q, kt));
  EXPECT_EQ(s.snapshot_counts().online.trusted_vecmats, 1u + 1u);  // hash row + check
  EXPECT_EQ(s.snapshot_counts().offline.trusted_vecmats, 2u);      // anchor
}

TEST(VerifiedAttnMatmul, TamperStrategiesDetected) {
  for (const char* spec : {"matmul-single", "matmul-rowswap", "matmul-scale:3"}) {
    int detected = 0;
    for (int t = 0; t < 300; ++t) {
      Session s = adversarial(spec, SeededRng::derive(21, t));
      const FieldMatrix q = sample_matrix(4, 4, s.rng(), s.field());
      const FieldMatrix kt = sample_matrix(4, 4, s.rng(), s.field());
      detected += !verified_attn_matmul(s, q, kt).outcome.pass;
    }
    EXPECT_EQ(detected, 300) << spec;
  }
}

TEST(VerifiedAttnMatmul, PlainCheckBlindToScaling) {
  // Scaling every reply entry scales the recovered product too, which the
  // plain hash identity cannot see.
  int detected = 0;
  for (int t = 0; t < 50; ++t) {
    Session s = adversarial("matmul-scale:3", SeededRng::derive(22, t));
    const FieldMatrix q = sample_matrix(4, 4, s.rng(), s.field());
    const FieldMatrix kt = sample_matrix(4, 4, s.rng(), s.field());
    AttnVerifyOptions o;
    o.anchored = false;
    const VerifiedMatrix r = verified_attn_matmul(s, q, kt, o);
    detected += !r.outcome.pass;
    EXPECT_EQ(r.value, scale(mat_mul_mod(q, kt), 3));
  }
  EXPECT_EQ(detected, 0);
}

TEST(VerifiedAdditive, HonestAndTampered) {
  Session s;
  const FieldMatrix x = sample_matrix(5, 3, s.rng(), s.field());
  const FieldMatrix w = sample_matrix(3, 4, s.rng(), s.field());
  const VerifiedMatrix r = verified_additive(s, x, w);
  EXPECT_TRUE(r.outcome.pass);
  EXPECT_EQ(r.value, mat_mul_mod(x, w));
  for (const char* spec : {"matmul-single", "matmul-rowswap", "matmul-scale:2"}) {
    Session a = adversarial(spec, 5);
    EXPECT_FALSE(verified_additive(a, x, w).outcome.pass) << spec;
  }
}
