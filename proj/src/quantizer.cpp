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

#include "shieldsim/quantizer.hpp"

#include <cmath>
#include <sstream>

#include "shieldsim/error.hpp"

namespace shieldsim {

QuantConfig::QuantConfig(unsigned frac_bits, FieldConfig field)
    : frac_bits_(frac_bits), field_(field) {
  if (2 * frac_bits >= 32 ||
      (std::uint64_t{1} << (2 * frac_bits)) >= field_.p()) {
    throw Error(ErrorCode::kInvalidArgument,
                "2^(2l) must be below the field modulus");
  }
}

namespace {

double lattice_scale(unsigned bits) { return std::ldexp(1.0, static_cast<int>(bits)); }

}  // namespace

Residue quantize(double x, const QuantConfig& q) {
  const double scaled = std::round(x * lattice_scale(q.frac_bits()));
  if (!std::isfinite(scaled) ||
      std::abs(scaled) > static_cast<double>(q.signed_limit())) {
    std::ostringstream os;
    os << "quantize: |round(" << x << " * 2^" << q.frac_bits()
       << ")| exceeds " << q.signed_limit();
    throw Error(ErrorCode::kRangeOverflow, os.str());
  }
  return q.field().from_signed(static_cast<std::int64_t>(scaled));
}

double dequantize(Residue e, unsigned scale_bits, const QuantConfig& q) {
  return static_cast<double>(q.field().to_signed(e)) / lattice_scale(scale_bits);
}

FieldMatrix quantize(const RealMatrix& m, const QuantConfig& q) {
  FieldMatrix out(m.rows(), m.cols(), q.field());
  for (std::size_t i = 0; i < m.size(); ++i)
    out.mutable_data()[i] = quantize(m.data()[i], q);
  return out;
}

RealMatrix dequantize(const FieldMatrix& m, unsigned scale_bits,
                      const QuantConfig& q) {
  RealMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.size(); ++i)
    out.mutable_data()[i] = dequantize(m.data()[i], scale_bits, q);
  return out;
}

double round_to_lattice(double x, const QuantConfig& q) {
  const double s = lattice_scale(q.frac_bits());
  return std::round(x * s) / s;
}

RealMatrix round_to_lattice(const RealMatrix& m, const QuantConfig& q) {
  RealMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.size(); ++i)
    out.mutable_data()[i] = round_to_lattice(m.data()[i], q);
  return out;
}

double budget_magnitude(const RangeBudget& b, const QuantConfig& q) {
  const double s = lattice_scale(q.frac_bits());
  return static_cast<double>(b.inner_dim) * std::round(b.x_max * s) *
         std::round(b.y_max * s);
}

void check_budget(const RangeBudget& b, const QuantConfig& q) {
  const double mag = budget_magnitude(b, q);
  if (!(mag < static_cast<double>(q.signed_limit()))) {
    std::ostringstream os;
    os.precision(17);
    os << "range budget exceeded: inner_dim=" << b.inner_dim
       << " x_max=" << b.x_max << " y_max=" << b.y_max << " gives magnitude "
       << mag << " >= " << q.signed_limit();
    throw Error(ErrorCode::kRangeOverflow, os.str());
  }
}

}  // namespace shieldsim
