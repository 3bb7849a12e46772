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

#include "shieldsim/field.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <tuple>
#include <utility>

#include "shieldsim/error.hpp"

namespace shieldsim {

bool is_prime(std::uint64_t n) noexcept {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d * d <= n; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

FieldConfig::FieldConfig(Residue p) : p_(p) {
  if (p < 7) {
    throw Error(ErrorCode::kInvalidArgument,
                "field modulus must be >= 7, got " + std::to_string(p));
  }
  if (!is_prime(p)) {
    throw Error(ErrorCode::kNotPrime,
                "field modulus " + std::to_string(p) + " is not prime");
  }
}

Residue FieldConfig::from_signed(std::int64_t v) const noexcept {
  std::int64_t r = v % static_cast<std::int64_t>(p_);
  if (r < 0) r += p_;
  return static_cast<Residue>(r);
}

Residue mod_inv(Residue x, const FieldConfig& cfg) {
  const std::int64_t p = cfg.p();
  std::int64_t a = x % p;
  if (a == 0) throw Error(ErrorCode::kZeroInverse, "zero has no inverse");
  std::int64_t old_r = a, r = p;
  std::int64_t old_s = 1, s = 0;
  while (r != 0) {
    const std::int64_t q = old_r / r;
    std::tie(old_r, r) = std::pair{r, old_r - q * r};
    std::tie(old_s, s) = std::pair{s, old_s - q * s};
  }
  return cfg.from_signed(old_s);
}

// ---------------------------------------------------------------------------
// FieldMatrix

FieldMatrix::FieldMatrix(std::size_t rows, std::size_t cols, FieldConfig cfg)
    : rows_(rows), cols_(cols), cfg_(cfg), data_(rows * cols, 0) {}

FieldMatrix::FieldMatrix(std::size_t rows, std::size_t cols,
                         std::vector<Residue> data, FieldConfig cfg)
    : rows_(rows), cols_(cols), cfg_(cfg), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "matrix data has " + std::to_string(data_.size()) +
                    " elements, expected " + std::to_string(rows_ * cols_));
  }
  for (Residue e : data_) {
    if (e >= cfg_.p()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "element " + std::to_string(e) + " not reduced mod " +
                      std::to_string(cfg_.p()));
    }
  }
}

FieldMatrix FieldMatrix::identity(std::size_t n, FieldConfig cfg) {
  FieldMatrix m(n, n, cfg);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

FieldMatrix FieldMatrix::transpose() const {
  FieldMatrix t(cols_, rows_, cfg_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

FieldMatrix FieldMatrix::row_block(std::size_t begin, std::size_t end) const {
  if (begin > end || end > rows_) {
    throw Error(ErrorCode::kDimensionMismatch, "row block out of range");
  }
  std::vector<Residue> d(data_.begin() + begin * cols_,
                         data_.begin() + end * cols_);
  return FieldMatrix(end - begin, cols_, std::move(d), cfg_);
}

FieldMatrix FieldMatrix::col_block(std::size_t begin, std::size_t end) const {
  if (begin > end || end > cols_) {
    throw Error(ErrorCode::kDimensionMismatch, "column block out of range");
  }
  FieldMatrix out(rows_, end - begin, cfg_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = begin; c < end; ++c) out(r, c - begin) = (*this)(r, c);
  return out;
}

// ---------------------------------------------------------------------------
// Arithmetic

namespace {

void require_same_field(const FieldMatrix& a, const FieldMatrix& b) {
  if (!(a.field() == b.field())) {
    throw Error(ErrorCode::kInvalidArgument, "operands use different fields");
  }
}

void require_same_shape(const FieldMatrix& a, const FieldMatrix& b,
                        const char* op) {
  require_same_field(a, b);
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(op) + ": shapes " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()) + " and " +
                    std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

}  // namespace

std::uint64_t safe_run_length(Residue p) noexcept {
  const std::uint64_t max_term = std::uint64_t{p - 1} * (p - 1);
  if (max_term == 0) return std::numeric_limits<std::uint64_t>::max();
  // acc < p after a reduction; `run` more terms must still fit.
  return (std::numeric_limits<std::uint64_t>::max() - (p - 1)) / max_term;
}

FieldMatrix mat_mul_mod(const FieldMatrix& a, const FieldMatrix& b) {
  require_same_field(a, b);
  if (a.cols() != b.rows()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "mat_mul_mod: " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()) + " * " +
                    std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
  const Residue p = a.field().p();
  const std::size_t m = a.rows(), n = a.cols(), k = b.cols();
  const std::uint64_t run = safe_run_length(p);
  FieldMatrix c(m, k, a.field());
  std::vector<std::uint64_t> acc(k);
  for (std::size_t i = 0; i < m; ++i) {
    std::fill(acc.begin(), acc.end(), 0);
    std::uint64_t pending = 0;
    for (std::size_t t = 0; t < n; ++t) {
      const std::uint64_t av = a(i, t);
      const Residue* brow = b.row(t).data();
      for (std::size_t j = 0; j < k; ++j) acc[j] += av * brow[j];
      if (++pending == run) {
        for (auto& v : acc) v %= p;
        pending = 0;
      }
    }
    for (std::size_t j = 0; j < k; ++j) c(i, j) = static_cast<Residue>(acc[j] % p);
  }
  return c;
}

std::vector<Residue> vec_mat_mod(std::span<const Residue> v,
                                 const FieldMatrix& m) {
  if (v.size() != m.rows()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "vec_mat_mod: vector length " + std::to_string(v.size()) +
                    " vs " + std::to_string(m.rows()) + " rows");
  }
  FieldMatrix row(1, v.size(), std::vector<Residue>(v.begin(), v.end()),
                  m.field());
  const FieldMatrix out = mat_mul_mod(row, m);
  return {out.data().begin(), out.data().end()};
}

FieldMatrix add(const FieldMatrix& a, const FieldMatrix& b) {
  require_same_shape(a, b, "add");
  FieldMatrix c(a.rows(), a.cols(), a.field());
  auto cd = c.mutable_data();
  for (std::size_t i = 0; i < cd.size(); ++i)
    cd[i] = a.field().add(a.data()[i], b.data()[i]);
  return c;
}

FieldMatrix sub(const FieldMatrix& a, const FieldMatrix& b) {
  require_same_shape(a, b, "sub");
  FieldMatrix c(a.rows(), a.cols(), a.field());
  auto cd = c.mutable_data();
  for (std::size_t i = 0; i < cd.size(); ++i)
    cd[i] = a.field().sub(a.data()[i], b.data()[i]);
  return c;
}

FieldMatrix scale(const FieldMatrix& a, Residue s) {
  FieldMatrix c(a.rows(), a.cols(), a.field());
  auto cd = c.mutable_data();
  for (std::size_t i = 0; i < cd.size(); ++i)
    cd[i] = a.field().mul(a.data()[i], s);
  return c;
}

FieldMatrix vstack(const FieldMatrix& top, const FieldMatrix& bottom) {
  require_same_field(top, bottom);
  if (top.cols() != bottom.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "vstack: column counts differ");
  }
  std::vector<Residue> d(top.data().begin(), top.data().end());
  d.insert(d.end(), bottom.data().begin(), bottom.data().end());
  return FieldMatrix(top.rows() + bottom.rows(), top.cols(), std::move(d),
                     top.field());
}

FieldMatrix hstack(const FieldMatrix& left, const FieldMatrix& right) {
  require_same_field(left, right);
  if (left.rows() != right.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "hstack: row counts differ");
  }
  FieldMatrix out(left.rows(), left.cols() + right.cols(), left.field());
  for (std::size_t r = 0; r < left.rows(); ++r) {
    for (std::size_t c = 0; c < left.cols(); ++c) out(r, c) = left(r, c);
    for (std::size_t c = 0; c < right.cols(); ++c)
      out(r, left.cols() + c) = right(r, c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Permutations

Permutation::Permutation(std::vector<std::size_t> indices)
    : indices_(std::move(indices)) {
  std::vector<bool> seen(indices_.size(), false);
  for (std::size_t v : indices_) {
    if (v >= indices_.size() || seen[v]) {
      throw Error(ErrorCode::kInvalidArgument,
                  "permutation indices are not a bijection");
    }
    seen[v] = true;
  }
}

Permutation Permutation::identity(std::size_t k) {
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  return Permutation(std::move(idx));
}

Permutation Permutation::inverse() const {
  std::vector<std::size_t> inv(indices_.size());
  for (std::size_t i = 0; i < indices_.size(); ++i) inv[indices_[i]] = i;
  return Permutation(std::move(inv));
}

FieldMatrix perm_rows(const FieldMatrix& m, const Permutation& lambda) {
  if (lambda.size() != m.rows()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "perm_rows: permutation length " +
                    std::to_string(lambda.size()) + " vs " +
                    std::to_string(m.rows()) + " rows");
  }
  FieldMatrix out(m.rows(), m.cols(), m.field());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto src = m.row(i);
    std::copy(src.begin(), src.end(),
              out.mutable_data().begin() + lambda[i] * m.cols());
  }
  return out;
}

FieldMatrix perm_cols(const FieldMatrix& m, const Permutation& lambda) {
  if (lambda.size() != m.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "perm_cols: permutation length " +
                    std::to_string(lambda.size()) + " vs " +
                    std::to_string(m.cols()) + " columns");
  }
  FieldMatrix out(m.rows(), m.cols(), m.field());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out(r, lambda[c]) = m(r, c);
  return out;
}

// ---------------------------------------------------------------------------
// Sampling

Residue sample_residue(SeededRng& rng, const FieldConfig& cfg) {
  return static_cast<Residue>(rng.uniform_below(cfg.p()));
}

FieldMatrix sample_matrix(std::size_t rows, std::size_t cols, SeededRng& rng,
                          const FieldConfig& cfg) {
  if (rows == 0 || cols == 0) {
    throw Error(ErrorCode::kInvalidArgument, "sample_matrix: empty shape");
  }
  FieldMatrix m(rows, cols, cfg);
  for (auto& e : m.mutable_data()) e = sample_residue(rng, cfg);
  return m;
}

Residue sample_scalar_nonzero(SeededRng& rng, const FieldConfig& cfg) {
  return static_cast<Residue>(1 + rng.uniform_below(cfg.p() - 1));
}

Residue sample_scalar_bounded(SeededRng& rng, std::uint32_t bound,
                              const FieldConfig& cfg) {
  if (bound == 0 || bound > (cfg.p() - 1) / 2) {
    throw Error(ErrorCode::kInvalidArgument, "scalar bound out of range");
  }
  // 2*bound nonzero values: -bound..-1, 1..bound.
  const auto k = static_cast<std::int64_t>(rng.uniform_below(2ULL * bound));
  const std::int64_t v = k < bound ? k - bound : k - bound + 1;
  return cfg.from_signed(v);
}

Permutation sample_permutation(std::size_t k, SeededRng& rng) {
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  for (std::size_t i = k; i > 1; --i) {
    const std::size_t j = rng.uniform_below(i);
    std::swap(idx[i - 1], idx[j]);
  }
  return Permutation(std::move(idx));
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json to_json(const FieldMatrix& m) {
  return {{"rows", m.rows()},
          {"cols", m.cols()},
          {"p", m.field().p()},
          {"data", std::vector<Residue>(m.data().begin(), m.data().end())}};
}

FieldMatrix field_matrix_from_json(const nlohmann::json& j) {
  try {
    const FieldConfig cfg(j.at("p").get<Residue>());
    return FieldMatrix(j.at("rows").get<std::size_t>(),
                       j.at("cols").get<std::size_t>(),
                       j.at("data").get<std::vector<Residue>>(), cfg);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse,
                std::string("malformed matrix JSON: ") + e.what());
  }
}

}  // namespace shieldsim
