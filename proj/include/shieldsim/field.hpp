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

#ifndef SHIELDSIM_FIELD_HPP_
#define SHIELDSIM_FIELD_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "shieldsim/rng.hpp"

namespace shieldsim {

using Residue = std::uint32_t;

inline constexpr Residue kDefaultPrime = 16777213;  // 2^24 - 3

// Deterministic primality for 32-bit inputs.
bool is_prime(std::uint64_t n) noexcept;

// The prime field Z_p. Construction validates p once; every other operation
// trusts it.
class FieldConfig {
 public:
  // Throws Error{kNotPrime} if p is composite, Error{kInvalidArgument} if
  // p < 7.
  explicit FieldConfig(Residue p = kDefaultPrime);

  Residue p() const noexcept { return p_; }

  Residue add(Residue a, Residue b) const noexcept {
    const std::uint64_t s = std::uint64_t{a} + b;
    return static_cast<Residue>(s >= p_ ? s - p_ : s);
  }
  Residue sub(Residue a, Residue b) const noexcept {
    return a >= b ? a - b : static_cast<Residue>(std::uint64_t{a} + p_ - b);
  }
  Residue neg(Residue a) const noexcept { return a == 0 ? 0 : p_ - a; }
  Residue mul(Residue a, Residue b) const noexcept {
    return static_cast<Residue>((std::uint64_t{a} * b) % p_);
  }
  // Maps a signed integer to its residue class.
  Residue from_signed(std::int64_t v) const noexcept;
  // Centered lift: values above (p-1)/2 map to negatives.
  std::int64_t to_signed(Residue e) const noexcept {
    return e > (p_ - 1) / 2 ? std::int64_t{e} - p_ : std::int64_t{e};
  }

  bool operator==(const FieldConfig&) const = default;

 private:
  Residue p_;
};

// Multiplicative inverse by the extended Euclidean algorithm. Throws
// Error{kZeroInverse} when x == 0 (mod p).
Residue mod_inv(Residue x, const FieldConfig& cfg);

// Row-major matrix of residues. Every element is reduced into [0, p).
class FieldMatrix {
 public:
  FieldMatrix(std::size_t rows, std::size_t cols, FieldConfig cfg);
  // Throws kDimensionMismatch on a size mismatch and kInvalidArgument on an
  // unreduced element.
  FieldMatrix(std::size_t rows, std::size_t cols, std::vector<Residue> data,
              FieldConfig cfg);

  static FieldMatrix identity(std::size_t n, FieldConfig cfg);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  const FieldConfig& field() const noexcept { return cfg_; }

  Residue operator()(std::size_t r, std::size_t c) const noexcept {
    return data_[r * cols_ + c];
  }
  // Caller keeps the value reduced.
  Residue& operator()(std::size_t r, std::size_t c) noexcept {
    return data_[r * cols_ + c];
  }

  std::span<const Residue> data() const noexcept { return data_; }
  std::span<Residue> mutable_data() noexcept { return data_; }
  std::span<const Residue> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  FieldMatrix transpose() const;
  // Rows [begin, end) / columns [begin, end).
  FieldMatrix row_block(std::size_t begin, std::size_t end) const;
  FieldMatrix col_block(std::size_t begin, std::size_t end) const;

  bool operator==(const FieldMatrix& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_ &&
           cfg_ == other.cfg_ && data_ == other.data_;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  FieldConfig cfg_;
  std::vector<Residue> data_;
};

// C = A * B mod p. Products of residues are accumulated in 64-bit lanes and
// reduced once every `safe_run_length(p)` terms, which is the largest count
// that provably cannot overflow.
FieldMatrix mat_mul_mod(const FieldMatrix& a, const FieldMatrix& b);
std::uint64_t safe_run_length(Residue p) noexcept;

// v * M for a row vector v of length M.rows().
std::vector<Residue> vec_mat_mod(std::span<const Residue> v,
                                 const FieldMatrix& m);

FieldMatrix add(const FieldMatrix& a, const FieldMatrix& b);
FieldMatrix sub(const FieldMatrix& a, const FieldMatrix& b);
FieldMatrix scale(const FieldMatrix& a, Residue s);
// [top; bottom] and [left | right].
FieldMatrix vstack(const FieldMatrix& top, const FieldMatrix& bottom);
FieldMatrix hstack(const FieldMatrix& left, const FieldMatrix& right);

// Bijection on [0, k). Convention used throughout: applying a permutation
// moves element i to position indices[i], i.e. output[indices[i]] = input[i].
class Permutation {
 public:
  // Throws kInvalidArgument unless `indices` is a bijection on [0, size).
  explicit Permutation(std::vector<std::size_t> indices);
  static Permutation identity(std::size_t k);

  std::size_t size() const noexcept { return indices_.size(); }
  std::size_t operator[](std::size_t i) const noexcept { return indices_[i]; }
  std::span<const std::size_t> indices() const noexcept { return indices_; }

  Permutation inverse() const;
  bool operator==(const Permutation&) const = default;

 private:
  std::vector<std::size_t> indices_;
};

inline Permutation perm_inverse(const Permutation& p) { return p.inverse(); }
FieldMatrix perm_rows(const FieldMatrix& m, const Permutation& lambda);
FieldMatrix perm_cols(const FieldMatrix& m, const Permutation& lambda);

FieldMatrix sample_matrix(std::size_t rows, std::size_t cols, SeededRng& rng,
                          const FieldConfig& cfg);
Residue sample_residue(SeededRng& rng, const FieldConfig& cfg);
Residue sample_scalar_nonzero(SeededRng& rng, const FieldConfig& cfg);
// Uniform nonzero scalar whose centered lift lies in [-bound, bound]. Used to
// restrict OutAttnMult scalars for guessing-game experiments.
Residue sample_scalar_bounded(SeededRng& rng, std::uint32_t bound,
                              const FieldConfig& cfg);
// Fisher-Yates.
Permutation sample_permutation(std::size_t k, SeededRng& rng);

// {"rows": r, "cols": c, "p": prime, "data": [residues]}
nlohmann::json to_json(const FieldMatrix& m);
FieldMatrix field_matrix_from_json(const nlohmann::json& j);

}  // namespace shieldsim

#endif  // SHIELDSIM_FIELD_HPP_
