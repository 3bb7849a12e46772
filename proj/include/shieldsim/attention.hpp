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

#ifndef SHIELDSIM_ATTENTION_HPP_
#define SHIELDSIM_ATTENTION_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include <json.hpp>

#include "shieldsim/field.hpp"
#include "shieldsim/real_matrix.hpp"
#include "shieldsim/session.hpp"

namespace shieldsim {

// A single toy transformer layer:
//
//   h   = layernorm ? LN(X) : X
//   A   = Concat_h(softmax(h W_q^h (h W_k^h)^T / sqrt(d_h)) h W_v^h) W_O
//   out = ffn ? ReLU(A W_1 + b_1) W_2 + b_2 : A
//
// Weights are kept as doubles; the quantized paths encode them on the
// lattice with the configured number of fractional bits.

struct AttentionConfig {
  std::size_t tokens = 16;    // N
  std::size_t dim = 32;       // D
  std::size_t heads = 2;      // H
  std::size_t head_dim = 16;  // d_h
  std::size_t ffn_dim = 0;    // hidden width; 0 with ffn on means 2 D
  unsigned frac_bits = 8;
  Residue prime = kDefaultPrime;
  bool verify = true;
  bool stabilize = true;
  bool ffn = false;
  bool layernorm = false;

  std::size_t ffn_hidden() const noexcept { return ffn_dim ? ffn_dim : 2 * dim; }
  // Throws InvalidArgument on zero sizes.
  void validate() const;
};

struct ModelWeights {
  std::vector<RealMatrix> w_q, w_k, w_v;  // H of D x d_h
  RealMatrix w_o;                         // (H d_h) x D
  RealMatrix w_1;                         // D x F
  std::vector<double> b_1;                // F
  RealMatrix w_2;                         // F x D
  std::vector<double> b_2;                // D
  std::vector<double> ln_gamma;           // D
  std::vector<double> ln_beta;            // D
  double ln_eps = 1e-5;

  // Throws DimensionMismatch unless every shape agrees with cfg.
  void validate(const AttentionConfig& cfg) const;
};

// Uniform weights on [-scale, scale] with scale = weight_scale / sqrt(fan_in).
// The default keeps every product of the demo and bench sizes within the
// range budget at 8 fractional bits.
ModelWeights generate_weights(const AttentionConfig& cfg, std::uint64_t seed,
                              double weight_scale = 1.0);
// Uniform on [-amplitude, amplitude].
RealMatrix generate_input(std::size_t tokens, std::size_t dim, std::uint64_t seed,
                          double amplitude = 1.0);

nlohmann::json to_json(const ModelWeights& w);
ModelWeights model_weights_from_json(const nlohmann::json& j);

// Double-precision reference, no quantization.
RealMatrix attention_plain(const RealMatrix& x, const ModelWeights& w,
                           const AttentionConfig& cfg);

// Same dataflow and lattice as attention_secure, computed in-process. Field
// stages match the secure path bit for bit.
RealMatrix attention_plain_quantized(const RealMatrix& x, const ModelWeights& w,
                                     const AttentionConfig& cfg);

// Outsources every linear stage and the exponentials to the session's worker.
// Throws IntegrityViolation naming the first stage whose check fails (verify
// on) and RangeOverflow when a product would leave the field's signed range.
// The session's frac_bits and prime must agree with cfg.
RealMatrix attention_secure(Session& s, const RealMatrix& x, const ModelWeights& w,
                            const AttentionConfig& cfg);

// Row-wise layer normalization, trusted-side.
RealMatrix layer_norm(const RealMatrix& x, const std::vector<double>& gamma,
                      const std::vector<double>& beta, double eps);

}  // namespace shieldsim

#endif  // SHIELDSIM_ATTENTION_HPP_
