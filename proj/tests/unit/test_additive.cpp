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

#include "shieldsim/additive_outsource.hpp"
#include "shieldsim/error.hpp"

using namespace shieldsim;

TEST(AdditiveOffline, IdentityAndZeroWeights) {
  const FieldConfig f;
  SeededRng rng(1);
  const AdditiveMask m = ao_offline(FieldMatrix::identity(3, f), {2, 3}, rng);
  EXPECT_EQ(m.rw(), m.r());
  const AdditiveMask z = ao_offline(FieldMatrix(3, 4, f), {2, 3}, rng);
  EXPECT_EQ(z.rw(), FieldMatrix(2, 4, f));
}

TEST(AdditiveOffline, CountsOffline) {
  Session s;
  const FieldMatrix w = sample_matrix(4, 5, s.rng(), s.field());
  const AdditiveMask m = ao_offline(s, w, {3, 4});
  EXPECT_EQ(m.rw(), mat_mul_mod(m.r(), w));
  EXPECT_EQ(s.snapshot_counts().offline.trusted_mults, 3u * 4u * 5u);
  EXPECT_EQ(s.snapshot_counts().online.trusted_mults, 0u);
}

TEST(AdditiveRun, ZeroMaskPassesThrough) {
  Session s;
  const FieldMatrix x = sample_matrix(2, 2, s.rng(), s.field());
  const FieldMatrix w = sample_matrix(2, 2, s.rng(), s.field());
  AdditiveMask m(FieldMatrix(2, 2, s.field()), FieldMatrix(2, 2, s.field()), payload_digest(w.data()));
  EXPECT_EQ(ao_run(s, x, w, m), mat_mul_mod(x, w));
  // The worker saw X itself.
  EXPECT_EQ(s.transcript().messages()[0].field_payload,
            std::vector<Residue>(x.data().begin(), x.data().end()));
}

TEST(AdditiveRun, RandomMatchesProductAndZero) {
  Session s;
  for (int i = 0; i < 20; ++i) {
    const FieldMatrix x = sample_matrix(4, 4, s.rng(), s.field());
    const FieldMatrix w = sample_matrix(4, 4, s.rng(), s.field());
    AdditiveMask m = ao_offline(s, w, {4, 4});
    EXPECT_EQ(ao_run(s, x, w, m), mat_mul_mod(x, w));
    AdditiveMask m0 = ao_offline(s, w, {4, 4});
    EXPECT_EQ(ao_run(s, FieldMatrix(4, 4, s.field()), w, m0), FieldMatrix(4, 4, s.field()));
  }
}

TEST(AdditiveRun, MaskIsSingleUse) {
  Session s;
  const FieldMatrix w = sample_matrix(2, 2, s.rng(), s.field());
  const FieldMatrix x = sample_matrix(2, 2, s.rng(), s.field());
  AdditiveMask m = ao_offline(s, w, {2, 2});
  ao_run(s, x, w, m);
  try {
    ao_run(s, x, w, m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMaskReuse);
  }
}

TEST(AdditiveRun, RejectsForeignWeights) {
  Session s;
  const FieldMatrix w = sample_matrix(2, 2, s.rng(), s.field());
  const FieldMatrix w2 = sample_matrix(2, 2, s.rng(), s.field());
  AdditiveMask m = ao_offline(s, w, {2, 2});
  EXPECT_THROW(ao_run(s, FieldMatrix(2, 2, s.field()), w2, m), Error);
}

TEST(AdditiveRun, WorkerNeverSeesX) {
  Session s;
  const FieldMatrix x = sample_matrix(3, 3, s.rng(), s.field());
  const FieldMatrix w = sample_matrix(3, 3, s.rng(), s.field());
  AdditiveMask m = ao_offline(s, w, {3, 3});
  ao_run(s, x, w, m);
  for (const Message& msg : s.transcript().messages()) {
    EXPECT_NE(msg.field_payload, std::vector<Residue>(x.data().begin(), x.data().end()));
  }
}
