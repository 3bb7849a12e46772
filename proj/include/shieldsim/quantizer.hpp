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

#ifndef SHIELDSIM_QUANTIZER_HPP_
#define SHIELDSIM_QUANTIZER_HPP_

#include <cstddef>
#include <cstdint>

#include "shieldsim/field.hpp"
#include "shieldsim/real_matrix.hpp"

namespace shieldsim {

// Fixed-point encoding with `frac_bits` fractional bits into Z_p.
class QuantConfig {
 public:
  // Requires 2^(2*frac_bits) < p.
  explicit QuantConfig(unsigned frac_bits = 8, FieldConfig field = FieldConfig());

  unsigned frac_bits() const noexcept { return frac_bits_; }
  const FieldConfig& field() const noexcept { return field_; }
  // Largest magnitude the centered lift can represent: (p - 1) / 2.
  std::int64_t signed_limit() const noexcept { return (field_.p() - 1) / 2; }

 private:
  unsigned frac_bits_;
  FieldConfig field_;
};

// Rounds x * 2^l half away from zero and maps negatives to the upper half of
// the field. Throws RangeOverflow when the rounded value does not fit the
// centered range.
Residue quantize(double x, const QuantConfig& q);

// Centered lift divided by 2^scale_bits. Use scale_bits = l for quantized
// values and 2l for products of two quantized operands.
double dequantize(Residue e, unsigned scale_bits, const QuantConfig& q);

FieldMatrix quantize(const RealMatrix& m, const QuantConfig& q);
RealMatrix dequantize(const FieldMatrix& m, unsigned scale_bits,
                      const QuantConfig& q);

// Snaps x onto the lattice k / 2^l without leaving the real domain.
double round_to_lattice(double x, const QuantConfig& q);
RealMatrix round_to_lattice(const RealMatrix& m, const QuantConfig& q);

// Bound for a product whose inner dimension is `inner_dim` and whose operands
// satisfy |x| <= x_max, |y| <= y_max.
struct RangeBudget {
  std::size_t inner_dim = 1;
  double x_max = 0.0;
  double y_max = 0.0;
};

// Worst-case accumulated magnitude inner_dim * round(x_max 2^l) * round(y_max 2^l).
double budget_magnitude(const RangeBudget& b, const QuantConfig& q);

// Throws RangeOverflow (with the violating magnitude in the message) unless
// the worst-case magnitude is strictly below (p - 1) / 2.
void check_budget(const RangeBudget& b, const QuantConfig& q);

}  // namespace shieldsim

#endif  // SHIELDSIM_QUANTIZER_HPP_
