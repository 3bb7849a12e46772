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
#include "shieldsim/out_softmax.hpp"

using namespace shieldsim;

TEST(OsmOffline, ZeroBoundGivesUnitMask) {
  SeededRng rng(1);
  const SoftmaxMask m = osm_offline(4, 0.0, rng);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(m.r[i], 0.0);
    EXPECT_EQ(m.exp_r[i], 1.0);
  }
}

TEST(OsmOffline, ExpMatchesLongDouble) {
  SeededRng rng(17);
  const SoftmaxMask m = osm_offline(3, 30.0, rng);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_LE(std::abs(m.r[i]), 30.0);
    const long double ref = std::exp(static_cast<long double>(m.r[i]));
    EXPECT_LE(std::abs((m.exp_r[i] - ref) / ref), 1e-15L);
  }
}

TEST(OsmOffline, ReproducibleAndCounted) {
  SeededRng a(3), b(3);
  EXPECT_EQ(osm_offline(5, 10.0, a).r, osm_offline(5, 10.0, b).r);
  Session s;
  osm_offline(s, 7, 10.0);
  EXPECT_EQ(s.snapshot_counts().offline.trusted_exps, 7u);
}

TEST(OsmOffline, RejectsBoundAboveCap) {
  SeededRng rng(1);
  EXPECT_THROW(osm_offline(2, 800.0, rng), Error);
}

TEST(OsmRun, Examples) {
  Session s;
  const auto half = osm_run(s, std::vector<double>{0.0, 0.0}).probs;
  EXPECT_NEAR(half[0], 0.5, 1e-15);
  EXPECT_NEAR(half[1], 0.5, 1e-15);
  const auto p = osm_run(s, std::vector<double>{1.0, 2.0, 3.0}).probs;
  EXPECT_NEAR(p[0], 0.09003057, 1e-8);
  EXPECT_NEAR(p[1], 0.24472847, 1e-8);
  EXPECT_NEAR(p[2], 0.66524096, 1e-8);
  for (double c : {-7.5, 0.0, 3.25, 100.0}) {
    const auto u = osm_run(s, std::vector<double>(6, c)).probs;
    for (double v : u) EXPECT_NEAR(v, 1.0 / 6.0, 1e-14);
  }
}

TEST(OsmRun, MatchesExtendedPrecisionOracle) {
  SeededRng shape(5);
  for (int t = 0; t < 200; ++t) {
    SessionOptions o;
    o.seed = SeededRng::derive(5, t);
    Session s(o);
    const std::size_t n = 1 + shape.uniform_below(512);
    std::vector<double> x(n);
    for (double& v : x) v = s.rng().uniform_real(-10.0, 10.0);
    const auto p = osm_run(s, x).probs;
    const auto ref = oracle::softmax(x);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      ASSERT_NEAR(p[i], ref[i], 1e-9);
      sum += p[i];
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(OsmRun, OperationCounts) {
  Session s;
  const std::size_t n = 10;
  osm_run(s, std::vector<double>(n, 1.0));
  const PhaseCounts& on = s.snapshot_counts().online;
  EXPECT_EQ(on.trusted_exps, 0u);
  EXPECT_EQ(on.worker_exps, n);
  EXPECT_EQ(on.trusted_mults, n);
  EXPECT_EQ(on.trusted_divs, n);
  EXPECT_EQ(on.trusted_cmps, n - 1);
  // n stabilizing subtractions, n mask subtractions, n - 1 sum additions.
  EXPECT_EQ(on.trusted_adds, 3 * n - 1);
  EXPECT_EQ(s.snapshot_counts().offline.trusted_exps, n);
}

TEST(OsmRun, WithoutStabilizationLargeInputsFail) {
  Session s;
  SoftmaxOptions o;
  o.stabilize = false;
  try {
    osm_run(s, std::vector<double>{690.0, 680.0}, o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kExponentRange);
  }
  // Stabilized, the same input is fine.
  EXPECT_NO_THROW(osm_run(s, std::vector<double>{690.0, 680.0}));
}

TEST(OsmExponentials, MaskReuseAndShape) {
  Session s;
  SoftmaxMask m = osm_offline(s, 3, 5.0);
  osm_exponentials(s, std::vector<double>{0.0, 1.0, 2.0}, m);
  try {
    osm_exponentials(s, std::vector<double>{0.0, 1.0, 2.0}, m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMaskReuse);
  }
  SoftmaxMask m2 = osm_offline(s, 3, 5.0);
  try {
    osm_exponentials(s, std::vector<double>{0.0, 1.0}, m2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
}

TEST(OsmRun, WorkerSeesOnlyMaskedValues) {
  Session s;
  const std::vector<double> x{0.25, -1.5, 2.0, 0.0};
  osm_run(s, x);
  const auto& msgs = s.transcript().messages();
  ASSERT_EQ(msgs.size(), 2u);
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_NE(msgs[0].real_payload[i], x[i] - 2.0);  // stabilized x
  }
}

TEST(ReferenceSoftmax, SingletonIsOne) {
  EXPECT_EQ(reference_softmax(std::vector<double>{42.0}), std::vector<double>{1.0});
}
