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

#include "shieldsim/error.hpp"
#include "shieldsim/quantizer.hpp"

using namespace shieldsim;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kOk;
}

}  // namespace

TEST(Quantize, Examples) {
  const QuantConfig q(8);
  EXPECT_EQ(quantize(0.0, q), 0u);
  EXPECT_EQ(quantize(1.5, q), 384u);
  EXPECT_EQ(quantize(-1.0, q), 16776957u);
  EXPECT_DOUBLE_EQ(dequantize(384, 8, q), 1.5);
  EXPECT_DOUBLE_EQ(dequantize(16776957, 8, q), -1.0);
}

TEST(Quantize, RoundsHalfAwayFromZero) {
  const QuantConfig q(1);
  // 0.25 * 2 = 0.5 -> 1; -0.25 * 2 = -0.5 -> -1.
  EXPECT_EQ(quantize(0.25, q), 1u);
  EXPECT_EQ(quantize(-0.25, q), q.field().p() - 1);
  EXPECT_EQ(quantize(0.24, q), 0u);
}

TEST(Quantize, RoundTripOnLattice) {
  const QuantConfig q(8);
  for (int k = -5000; k <= 5000; k += 7) {
    const double x = k / 256.0;
    EXPECT_DOUBLE_EQ(dequantize(quantize(x, q), 8, q), x);
    EXPECT_DOUBLE_EQ(round_to_lattice(x + 0.3 / 256.0, q), x);
  }
}

TEST(Quantize, RejectsOutOfRange) {
  const QuantConfig q(8);
  EXPECT_EQ(code_of([&] { quantize(40000.0, q); }), ErrorCode::kRangeOverflow);
  EXPECT_EQ(code_of([&] { quantize(std::nan(""), q); }), ErrorCode::kRangeOverflow);
  EXPECT_EQ(code_of([&] { quantize(32767.0, q); }), ErrorCode::kOk);
}

TEST(Quantize, ProductScale) {
  // A product of two l-bit values is read back at 2l bits.
  const QuantConfig q(8);
  const FieldConfig& f = q.field();
  const Residue a = quantize(1.5, q), b = quantize(-2.25, q);
  EXPECT_DOUBLE_EQ(dequantize(f.mul(a, b), 16, q), -3.375);
}

TEST(QuantConfig, RequiresDoubleWidthHeadroom) {
  EXPECT_EQ(code_of([] { QuantConfig q(12); }), ErrorCode::kInvalidArgument);
  EXPECT_NO_THROW(QuantConfig(12, FieldConfig(2147483647u)));
  EXPECT_NO_THROW(QuantConfig(11));
}

TEST(Budget, Examples) {
  const QuantConfig q(8);
  EXPECT_DOUBLE_EQ(budget_magnitude({64, 1.0, 1.0}, q), 4194304.0);
  EXPECT_NO_THROW(check_budget({64, 1.0, 1.0}, q));
  EXPECT_EQ(code_of([&] { check_budget({256, 1.0, 1.0}, q); }), ErrorCode::kRangeOverflow);
  EXPECT_NO_THROW(check_budget({1, 0.0, 0.0}, q));
}

TEST(Budget, DiagnosticNamesMagnitude) {
  const QuantConfig q(8);
  try {
    check_budget({256, 1.0, 1.0}, q);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("16777216"), std::string::npos) << e.what();
  }
}

TEST(Quantize, MatrixForm) {
  const QuantConfig q(4);
  const RealMatrix m(2, 2, {0.5, -0.5, 1.0, 0.0625});
  const FieldMatrix e = quantize(m, q);
  EXPECT_EQ(e(0, 0), 8u);
  EXPECT_EQ(e(0, 1), q.field().p() - 8);
  EXPECT_EQ(e(1, 1), 1u);
  EXPECT_EQ(max_abs_diff(dequantize(e, 4, q), m), 0.0);
}
