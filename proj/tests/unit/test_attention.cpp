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

#include <cstdlib>
#include <fstream>
#include <set>

#include "shieldsim/attention.hpp"
#include "shieldsim/error.hpp"

using namespace shieldsim;

namespace {

AttentionConfig small_config() {
  AttentionConfig c;
  c.tokens = 16;
  c.dim = 32;
  c.heads = 2;
  c.head_dim = 16;
  return c;
}

Session session_for(const AttentionConfig& c, std::uint64_t seed = 1,
                    const std::string& adversary = "honest") {
  SessionOptions o;
  o.seed = seed;
  o.prime = c.prime;
  o.frac_bits = c.frac_bits;
  o.adversary = AdversaryStrategy::parse(adversary);
  return Session(o);
}

nlohmann::json load_golden(const std::string& name) {
  const char* dir = std::getenv("SHIELDSIM_GOLDEN_DIR");
  const std::string path = std::string(dir ? dir : "tests/golden") + "/" + name;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing golden file " + path);
  return nlohmann::json::parse(in);
}

}  // namespace

TEST(AttentionPlain, MatchesNumpyGolden) {
  for (const char* name : {"plain_n4_d8_h2.json", "plain_n4_d8_h2_ffn_ln.json"}) {
    const nlohmann::json g = load_golden(name);
    AttentionConfig c;
    c.tokens = g["config"]["tokens"];
    c.dim = g["config"]["dim"];
    c.heads = g["config"]["heads"];
    c.head_dim = g["config"]["head_dim"];
    c.ffn = g["config"]["ffn"];
    c.ffn_dim = g["config"]["ffn_dim"];
    c.layernorm = g["config"]["layernorm"];
    const ModelWeights w = model_weights_from_json(g["weights"]);
    const RealMatrix out = attention_plain(real_matrix_from_json(g["input"]), w, c);
    EXPECT_LE(max_abs_diff(out, real_matrix_from_json(g["output"])), 1e-12) << name;
  }
}

TEST(AttentionPlain, ZeroInputGivesZero) {
  const AttentionConfig c = small_config();
  const ModelWeights w = generate_weights(c, 3);
  const RealMatrix zero(c.tokens, c.dim);
  EXPECT_EQ(attention_plain(zero, w, c).max_abs(), 0.0);
  EXPECT_EQ(attention_plain_quantized(zero, w, c).max_abs(), 0.0);
  Session s = session_for(c);
  EXPECT_EQ(attention_secure(s, zero, w, c).max_abs(), 0.0);
}

TEST(AttentionPlain, SingleTokenIsValueProjection) {
  AttentionConfig c = small_config();
  c.tokens = 1;
  const ModelWeights w = generate_weights(c, 4);
  const RealMatrix x = generate_input(1, c.dim, 5);
  RealMatrix concat(1, c.heads * c.head_dim);
  for (std::size_t h = 0; h < c.heads; ++h) {
    const RealMatrix v = matmul(x, w.w_v[h]);
    for (std::size_t j = 0; j < c.head_dim; ++j) concat(0, h * c.head_dim + j) = v(0, j);
  }
  EXPECT_LE(max_abs_diff(attention_plain(x, w, c), matmul(concat, w.w_o)), 1e-14);
}

TEST(AttentionSecure, MatchesQuantizedReference) {
  for (bool ffn : {false, true}) {
    for (bool ln : {false, true}) {
      AttentionConfig c = small_config();
      c.ffn = ffn;
      c.layernorm = ln;
      const ModelWeights w = generate_weights(c, 7);
      const RealMatrix x = generate_input(c.tokens, c.dim, 8);
      Session s = session_for(c);
      const RealMatrix secure = attention_secure(s, x, w, c);
      EXPECT_LE(max_abs_diff(secure, attention_plain_quantized(x, w, c)), 1e-6)
          << "ffn=" << ffn << " ln=" << ln;
      EXPECT_EQ(s.snapshot_counts().online.trusted_exps, 0u);
      for (const auto& v : s.verifications()) EXPECT_TRUE(v.pass) << v.stage;
    }
  }
}

TEST(AttentionSecure, VerificationCoversEveryOutsourcedStage) {
  AttentionConfig c = small_config();
  c.ffn = true;
  const ModelWeights w = generate_weights(c, 7);
  Session s = session_for(c);
  attention_secure(s, generate_input(c.tokens, c.dim, 8), w, c);
  std::set<std::string> stages;
  for (const auto& v : s.verifications()) stages.insert(v.stage);
  for (const char* st : {"q-proj", "k-proj", "v-proj", "attn-matmul", "softmax", "attn-value",
                         "out-proj", "ffn-up", "ffn-down"}) {
    EXPECT_TRUE(stages.count(st)) << st;
  }
}

TEST(AttentionQuantized, MoreBitsLessError) {
  AttentionConfig c8 = small_config();
  c8.prime = 2147483647u;
  AttentionConfig c12 = c8;
  c12.frac_bits = 12;
  const ModelWeights w = generate_weights(c8, 9);
  const RealMatrix x = generate_input(c8.tokens, c8.dim, 10);
  const RealMatrix ref = attention_plain(x, w, c8);
  const double e8 = max_abs_diff(attention_plain_quantized(x, w, c8), ref);
  const double e12 = max_abs_diff(attention_plain_quantized(x, w, c12), ref);
  EXPECT_GT(e8, 0.0);
  EXPECT_LT(e12, e8);
}

TEST(AttentionSecure, TamperNamesStage) {
  const AttentionConfig c = small_config();
  const ModelWeights w = generate_weights(c, 7);
  const RealMatrix x = generate_input(c.tokens, c.dim, 8);
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"matmul-single@attn-matmul", "attn-matmul"},
      {"matmul-single", "q-proj"},
      {"matmul-scale:2@attn-matmul", "attn-matmul"},
      {"matmul-rowswap@out-proj", "out-proj"},
      {"softmax-a", "softmax"},
      {"softmax-b", "softmax"},
      {"softmax-swap", "softmax"},
  };
  for (const auto& [spec, stage] : cases) {
    Session s = session_for(c, 2, spec);
    try {
      attention_secure(s, x, w, c);
      ADD_FAILURE() << spec << " went unnoticed";
    } catch (const IntegrityViolation& e) {
      EXPECT_EQ(e.stage(), stage) << spec;
    }
  }
}

TEST(AttentionSecure, WithoutVerificationTamperIsSilent) {
  AttentionConfig c = small_config();
  c.verify = false;
  const ModelWeights w = generate_weights(c, 7);
  const RealMatrix x = generate_input(c.tokens, c.dim, 8);
  Session s = session_for(c, 2, "matmul-single:1000@attn-matmul");
  const RealMatrix out = attention_secure(s, x, w, c);
  EXPECT_GT(max_abs_diff(out, attention_plain_quantized(x, w, c)), 0.0);
}

TEST(AttentionSecure, RangeBudgetEnforced) {
  const AttentionConfig c = small_config();
  const ModelWeights w = generate_weights(c, 7, 40.0);
  Session s = session_for(c);
  try {
    attention_secure(s, generate_input(c.tokens, c.dim, 8, 20.0), w, c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRangeOverflow);
    EXPECT_NE(std::string(e.what()).find("stage '"), std::string::npos) << e.what();
  }
}

TEST(AttentionSecure, TrustedShareAt128) {
  AttentionConfig c;
  c.tokens = 128;
  c.dim = 128;
  c.heads = 4;
  c.head_dim = 32;
  const ModelWeights w = generate_weights(c, 1);
  Session s = session_for(c);
  attention_secure(s, generate_input(c.tokens, c.dim, 2), w, c);
  const PhaseCounts& on = s.snapshot_counts().online;
  EXPECT_LE(static_cast<double>(on.trusted_mults), 0.15 * static_cast<double>(on.worker_mults));
}

TEST(AttentionConfig, Validation) {
  AttentionConfig c = small_config();
  c.tokens = 0;
  EXPECT_THROW(c.validate(), Error);
  const AttentionConfig ok = small_config();
  ModelWeights w = generate_weights(ok, 1);
  w.w_o = RealMatrix(3, 3);
  EXPECT_THROW(w.validate(ok), Error);
}

TEST(ModelWeights, JsonRoundTrip) {
  AttentionConfig c = small_config();
  c.ffn = true;
  c.layernorm = true;
  const ModelWeights w = generate_weights(c, 11);
  const ModelWeights r = model_weights_from_json(to_json(w));
  EXPECT_EQ(to_json(r), to_json(w));
}
