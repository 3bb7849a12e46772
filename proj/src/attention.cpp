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

#include "shieldsim/attention.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include "shieldsim/additive_outsource.hpp"
#include "shieldsim/error.hpp"
#include "shieldsim/out_attn_mult.hpp"
#include "shieldsim/out_softmax.hpp"
#include "shieldsim/quantizer.hpp"
#include "shieldsim/u_verify.hpp"

namespace shieldsim {

void AttentionConfig::validate() const {
  if (tokens == 0 || dim == 0 || heads == 0 || head_dim == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "attention config: tokens, dim, heads and head_dim must be >= 1");
  }
}

void ModelWeights::validate(const AttentionConfig& cfg) const {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::kDimensionMismatch, "model weights: " + what);
  };
  need(w_q.size() == cfg.heads && w_k.size() == cfg.heads && w_v.size() == cfg.heads,
       "expected one W_q/W_k/W_v per head");
  for (std::size_t h = 0; h < cfg.heads; ++h) {
    for (const RealMatrix* m : {&w_q[h], &w_k[h], &w_v[h]}) {
      need(m->rows() == cfg.dim && m->cols() == cfg.head_dim, "head projection must be D x d_h");
    }
  }
  need(w_o.rows() == cfg.heads * cfg.head_dim && w_o.cols() == cfg.dim,
       "W_O must be (H d_h) x D");
  if (cfg.ffn) {
    const std::size_t f = cfg.ffn_hidden();
    need(w_1.rows() == cfg.dim && w_1.cols() == f && b_1.size() == f, "W_1/b_1 shape");
    need(w_2.rows() == f && w_2.cols() == cfg.dim && b_2.size() == cfg.dim, "W_2/b_2 shape");
  }
  if (cfg.layernorm) {
    need(ln_gamma.size() == cfg.dim && ln_beta.size() == cfg.dim, "layer norm parameters");
  }
}

namespace {

RealMatrix uniform_matrix(std::size_t rows, std::size_t cols, double bound, SeededRng& rng) {
  RealMatrix m(rows, cols);
  for (double& v : m.mutable_data()) v = rng.uniform_real(-bound, bound);
  return m;
}

std::vector<double> uniform_vector(std::size_t n, double bound, SeededRng& rng) {
  std::vector<double> v(n);
  for (double& e : v) e = rng.uniform_real(-bound, bound);
  return v;
}

}  // namespace

ModelWeights generate_weights(const AttentionConfig& cfg, std::uint64_t seed,
                              double weight_scale) {
  cfg.validate();
  SeededRng rng(SeededRng::derive(seed, 0x57E16475ULL));
  ModelWeights w;
  const double s_in = weight_scale / std::sqrt(static_cast<double>(cfg.dim));
  for (std::size_t h = 0; h < cfg.heads; ++h) {
    w.w_q.push_back(uniform_matrix(cfg.dim, cfg.head_dim, s_in, rng));
    w.w_k.push_back(uniform_matrix(cfg.dim, cfg.head_dim, s_in, rng));
    w.w_v.push_back(uniform_matrix(cfg.dim, cfg.head_dim, s_in, rng));
  }
  const std::size_t hd = cfg.heads * cfg.head_dim;
  w.w_o = uniform_matrix(hd, cfg.dim, weight_scale / std::sqrt(static_cast<double>(hd)), rng);
  if (cfg.ffn) {
    const std::size_t f = cfg.ffn_hidden();
    w.w_1 = uniform_matrix(cfg.dim, f, s_in, rng);
    w.b_1 = uniform_vector(f, 0.1, rng);
    w.w_2 = uniform_matrix(f, cfg.dim, weight_scale / std::sqrt(static_cast<double>(f)), rng);
    w.b_2 = uniform_vector(cfg.dim, 0.1, rng);
  }
  w.ln_gamma.assign(cfg.dim, 1.0);
  w.ln_beta.assign(cfg.dim, 0.0);
  return w;
}

RealMatrix generate_input(std::size_t tokens, std::size_t dim, std::uint64_t seed,
                          double amplitude) {
  SeededRng rng(SeededRng::derive(seed, 0x1A9E7ULL));
  return uniform_matrix(tokens, dim, amplitude, rng);
}

nlohmann::json to_json(const ModelWeights& w) {
  auto list = [](const std::vector<RealMatrix>& ms) {
    nlohmann::json a = nlohmann::json::array();
    for (const RealMatrix& m : ms) a.push_back(to_json(m));
    return a;
  };
  nlohmann::json j;
  j["w_q"] = list(w.w_q);
  j["w_k"] = list(w.w_k);
  j["w_v"] = list(w.w_v);
  j["w_o"] = to_json(w.w_o);
  if (w.w_1.size()) {
    j["w_1"] = to_json(w.w_1);
    j["b_1"] = w.b_1;
    j["w_2"] = to_json(w.w_2);
    j["b_2"] = w.b_2;
  }
  j["ln_gamma"] = w.ln_gamma;
  j["ln_beta"] = w.ln_beta;
  j["ln_eps"] = w.ln_eps;
  return j;
}

ModelWeights model_weights_from_json(const nlohmann::json& j) {
  try {
    ModelWeights w;
    for (const auto& m : j.at("w_q")) w.w_q.push_back(real_matrix_from_json(m));
    for (const auto& m : j.at("w_k")) w.w_k.push_back(real_matrix_from_json(m));
    for (const auto& m : j.at("w_v")) w.w_v.push_back(real_matrix_from_json(m));
    w.w_o = real_matrix_from_json(j.at("w_o"));
    if (j.contains("w_1")) {
      w.w_1 = real_matrix_from_json(j.at("w_1"));
      w.b_1 = j.at("b_1").get<std::vector<double>>();
      w.w_2 = real_matrix_from_json(j.at("w_2"));
      w.b_2 = j.at("b_2").get<std::vector<double>>();
    }
    if (j.contains("ln_gamma")) w.ln_gamma = j.at("ln_gamma").get<std::vector<double>>();
    if (j.contains("ln_beta")) w.ln_beta = j.at("ln_beta").get<std::vector<double>>();
    if (j.contains("ln_eps")) w.ln_eps = j.at("ln_eps").get<double>();
    return w;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("model weights: ") + e.what());
  }
}

RealMatrix layer_norm(const RealMatrix& x, const std::vector<double>& gamma,
                      const std::vector<double>& beta, double eps) {
  if (gamma.size() != x.cols() || beta.size() != x.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "layer_norm: parameter length differs");
  }
  RealMatrix out(x.rows(), x.cols());
  const double d = static_cast<double>(x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto row = x.row(i);
    double mean = 0.0;
    for (double v : row) mean += v;
    mean /= d;
    double var = 0.0;
    for (double v : row) var += (v - mean) * (v - mean);
    var /= d;
    const double inv = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < x.cols(); ++j) {
      out(i, j) = gamma[j] * (row[j] - mean) * inv + beta[j];
    }
  }
  return out;
}

namespace {

void check_input(const RealMatrix& x, const ModelWeights& w, const AttentionConfig& cfg) {
  cfg.validate();
  w.validate(cfg);
  if (x.rows() != cfg.tokens || x.cols() != cfg.dim) {
    throw Error(ErrorCode::kDimensionMismatch,
                "attention: X is " + std::to_string(x.rows()) + "x" +
                    std::to_string(x.cols()) + ", config says " +
                    std::to_string(cfg.tokens) + "x" + std::to_string(cfg.dim));
  }
}

void add_bias_relu(RealMatrix& m, const std::vector<double>& b, bool relu) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto row = m.mutable_row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) {
      row[j] += b[j];
      if (relu && row[j] < 0.0) row[j] = 0.0;
    }
  }
}

// ---------------------------------------------------------------------------
// Shared quantized dataflow. The backend decides who computes each product.

class LinearBackend {
 public:
  virtual ~LinearBackend() = default;
  // X * W with a constant W.
  virtual FieldMatrix additive(const std::string& stage, const FieldMatrix& x,
                               const FieldMatrix& w) = 0;
  // A * B with both operands runtime values.
  virtual FieldMatrix attn(const std::string& stage, const FieldMatrix& a,
                           const FieldMatrix& b) = 0;
  virtual std::vector<double> softmax(std::span<const double> row) = 0;
  virtual void trusted(const std::string&, OpKind, std::uint64_t) {}
};

class PlainBackend final : public LinearBackend {
 public:
  FieldMatrix additive(const std::string&, const FieldMatrix& x,
                       const FieldMatrix& w) override {
    return mat_mul_mod(x, w);
  }
  FieldMatrix attn(const std::string&, const FieldMatrix& a,
                   const FieldMatrix& b) override {
    return mat_mul_mod(a, b);
  }
  std::vector<double> softmax(std::span<const double> row) override {
    return reference_softmax(row);
  }
};

class SecureBackend final : public LinearBackend {
 public:
  SecureBackend(Session& s, bool verify, bool stabilize)
      : s_(s), verify_(verify), stabilize_(stabilize) {}

  FieldMatrix additive(const std::string& stage, const FieldMatrix& x,
                       const FieldMatrix& w) override {
    Session::StageScope scope(s_, stage);
    if (!verify_) {
      AdditiveMask mask = ao_offline(s_, w, {x.rows(), x.cols()});
      return ao_run(s_, x, w, mask);
    }
    VerifiedMatrix r = verified_additive(s_, x, w);
    if (!r.outcome.pass) throw IntegrityViolation(stage, r.outcome.diagnostic);
    return std::move(r.value);
  }

  FieldMatrix attn(const std::string& stage, const FieldMatrix& a,
                   const FieldMatrix& b) override {
    Session::StageScope scope(s_, stage);
    if (!verify_) return oam_run(s_, a, b);
    VerifiedMatrix r = verified_attn_matmul(s_, a, b);
    if (!r.outcome.pass) throw IntegrityViolation(stage, r.outcome.diagnostic);
    return std::move(r.value);
  }

  std::vector<double> softmax(std::span<const double> row) override {
    Session::StageScope scope(s_, "softmax");
    if (!verify_) {
      SoftmaxOptions opts;
      opts.stabilize = stabilize_;
      return osm_run(s_, row, opts).probs;
    }
    VerifiedSoftmaxOptions opts;
    opts.softmax.stabilize = stabilize_;
    VerifiedSoftmax r = verified_softmax(s_, row, opts);
    if (!r.outcome.pass) throw IntegrityViolation("softmax", r.outcome.diagnostic);
    return std::move(r.result.probs);
  }

  void trusted(const std::string& stage, OpKind kind, std::uint64_t amount) override {
    Session::StageScope scope(s_, stage);
    s_.count(kind, amount);
  }

 private:
  Session& s_;
  bool verify_;
  bool stabilize_;
};

double max_abs_value(const FieldMatrix& m, const QuantConfig& q) {
  std::int64_t mx = 0;
  const FieldConfig& f = m.field();
  for (Residue e : m.data()) mx = std::max(mx, std::abs(f.to_signed(e)));
  return std::ldexp(static_cast<double>(mx), -static_cast<int>(q.frac_bits()));
}

void guard(const std::string& stage, const FieldMatrix& a, const FieldMatrix& b,
           const QuantConfig& q) {
  try {
    check_budget({a.cols(), max_abs_value(a, q), max_abs_value(b, q)}, q);
  } catch (const Error& e) {
    throw Error(e.code(), "stage '" + stage + "': " + e.what());
  }
}

// Products come back at 2l fractional bits; bring them back to l.
FieldMatrix requantize(const FieldMatrix& m, const QuantConfig& q) {
  return quantize(dequantize(m, 2 * q.frac_bits(), q), q);
}

FieldMatrix linear(LinearBackend& be, const std::string& stage, const FieldMatrix& x,
                   const FieldMatrix& w, const QuantConfig& q) {
  guard(stage, x, w, q);
  return be.additive(stage, x, w);
}

RealMatrix run_quantized(LinearBackend& be, const RealMatrix& x_in, const ModelWeights& w,
                         const AttentionConfig& cfg, const QuantConfig& q) {
  const std::size_t n = cfg.tokens;
  RealMatrix x = x_in;
  if (cfg.layernorm) {
    x = layer_norm(x, w.ln_gamma, w.ln_beta, w.ln_eps);
    be.trusted("layernorm", OpKind::kMult, 3 * x.size());
  }
  const FieldMatrix xq = quantize(x, q);
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(cfg.head_dim));

  std::vector<FieldMatrix> heads;
  for (std::size_t h = 0; h < cfg.heads; ++h) {
    const FieldMatrix qh = requantize(linear(be, "q-proj", xq, quantize(w.w_q[h], q), q), q);
    const FieldMatrix kh = requantize(linear(be, "k-proj", xq, quantize(w.w_k[h], q), q), q);
    const FieldMatrix vh = requantize(linear(be, "v-proj", xq, quantize(w.w_v[h], q), q), q);

    const FieldMatrix kt = kh.transpose();
    guard("attn-matmul", qh, kt, q);
    const RealMatrix logits = dequantize(be.attn("attn-matmul", qh, kt), 2 * q.frac_bits(), q);

    RealMatrix probs(n, n);
    std::vector<double> row(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) row[j] = logits(i, j) * inv_sqrt;
      const std::vector<double> p = be.softmax(row);
      std::copy(p.begin(), p.end(), probs.mutable_row(i).begin());
    }
    be.trusted("softmax", OpKind::kMult, n * n);

    const FieldMatrix pq = quantize(probs, q);
    guard("attn-value", pq, vh, q);
    heads.push_back(requantize(be.attn("attn-value", pq, vh), q));
  }
  FieldMatrix concat = heads.front();
  for (std::size_t h = 1; h < heads.size(); ++h) concat = hstack(concat, heads[h]);

  const FieldMatrix out_q = linear(be, "out-proj", concat, quantize(w.w_o, q), q);
  RealMatrix out = dequantize(out_q, 2 * q.frac_bits(), q);
  if (!cfg.ffn) return out;

  const FieldMatrix a = quantize(out, q);
  RealMatrix hidden = dequantize(linear(be, "ffn-up", a, quantize(w.w_1, q), q),
                                 2 * q.frac_bits(), q);
  add_bias_relu(hidden, w.b_1, true);
  be.trusted("ffn-act", OpKind::kAdd, hidden.size());
  be.trusted("ffn-act", OpKind::kCmp, hidden.size());
  const FieldMatrix hq = quantize(hidden, q);
  RealMatrix y = dequantize(linear(be, "ffn-down", hq, quantize(w.w_2, q), q),
                            2 * q.frac_bits(), q);
  add_bias_relu(y, w.b_2, false);
  be.trusted("ffn-act", OpKind::kAdd, y.size());
  return y;
}

}  // namespace

RealMatrix attention_plain(const RealMatrix& x_in, const ModelWeights& w,
                           const AttentionConfig& cfg) {
  check_input(x_in, w, cfg);
  const std::size_t n = cfg.tokens;
  const RealMatrix x = cfg.layernorm ? layer_norm(x_in, w.ln_gamma, w.ln_beta, w.ln_eps) : x_in;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(cfg.head_dim));

  RealMatrix concat(n, cfg.heads * cfg.head_dim);
  for (std::size_t h = 0; h < cfg.heads; ++h) {
    const RealMatrix qh = matmul(x, w.w_q[h]);
    const RealMatrix kh = matmul(x, w.w_k[h]);
    const RealMatrix vh = matmul(x, w.w_v[h]);
    RealMatrix scores = matmul(qh, kh.transpose());
    for (std::size_t i = 0; i < n; ++i) {
      auto row = scores.mutable_row(i);
      for (double& v : row) v *= inv_sqrt;
      const std::vector<double> p = reference_softmax(row);
      std::copy(p.begin(), p.end(), row.begin());
    }
    const RealMatrix head = matmul(scores, vh);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < cfg.head_dim; ++j) {
        concat(i, h * cfg.head_dim + j) = head(i, j);
      }
    }
  }
  RealMatrix out = matmul(concat, w.w_o);
  if (!cfg.ffn) return out;
  RealMatrix hidden = matmul(out, w.w_1);
  add_bias_relu(hidden, w.b_1, true);
  RealMatrix y = matmul(hidden, w.w_2);
  add_bias_relu(y, w.b_2, false);
  return y;
}

RealMatrix attention_plain_quantized(const RealMatrix& x, const ModelWeights& w,
                                     const AttentionConfig& cfg) {
  check_input(x, w, cfg);
  const QuantConfig q(cfg.frac_bits, FieldConfig(cfg.prime));
  PlainBackend be;
  return run_quantized(be, x, w, cfg, q);
}

RealMatrix attention_secure(Session& s, const RealMatrix& x, const ModelWeights& w,
                            const AttentionConfig& cfg) {
  check_input(x, w, cfg);
  if (s.quant().frac_bits() != cfg.frac_bits || s.field().p() != cfg.prime) {
    throw Error(ErrorCode::kInvalidArgument,
                "attention_secure: session quantization differs from the config");
  }
  SecureBackend be(s, cfg.verify, cfg.stabilize);
  return run_quantized(be, x, w, cfg, s.quant());
}

}  // namespace shieldsim
