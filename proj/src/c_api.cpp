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

#include "shieldsim/shieldsim.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include <json.hpp>

#include "shieldsim/additive_outsource.hpp"
#include "shieldsim/commands.hpp"
#include "shieldsim/error.hpp"
#include "shieldsim/out_attn_mult.hpp"
#include "shieldsim/out_softmax.hpp"
#include "shieldsim/report.hpp"
#include "shieldsim/session.hpp"
#include "shieldsim/u_verify.hpp"

struct shieldsim_session {
  std::unique_ptr<shieldsim::Session> impl;
};

struct shieldsim_matrix {
  shieldsim::FieldMatrix impl;
};

namespace {

using shieldsim::Error;
using shieldsim::ErrorCode;

thread_local std::string g_last_error;

shieldsim_status fail(ErrorCode code, const std::string& msg) {
  g_last_error = msg;
  return static_cast<shieldsim_status>(code);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Runs body() and maps exceptions onto status codes.
template <typename F>
shieldsim_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return SHIELDSIM_OK;
  } catch (const Error& e) {
    return fail(e.code(), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(ErrorCode::kParse, e.what());
  } catch (const std::bad_alloc&) {
    return fail(ErrorCode::kInternal, "out of memory");
  } catch (const std::exception& e) {
    return fail(ErrorCode::kInternal, e.what());
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
}

shieldsim::SessionOptions parse_session_options(const char* text) {
  shieldsim::SessionOptions o;
  if (text == nullptr || *text == '\0') return o;
  const nlohmann::json j = nlohmann::json::parse(text);
  require(j.is_object(), "session options must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "seed") o.seed = v.get<std::uint64_t>();
    else if (key == "prime") o.prime = v.get<shieldsim::Residue>();
    else if (key == "frac_bits") o.frac_bits = v.get<unsigned>();
    else if (key == "exp_cap") o.exp_cap = v.get<double>();
    else if (key == "adversary") o.adversary = shieldsim::AdversaryStrategy::parse(v.get<std::string>());
    else if (key == "keep_payloads") o.keep_payloads = v.get<bool>();
    else throw Error(ErrorCode::kInvalidArgument, "unknown session option '" + key + "'");
  }
  return o;
}

}  // namespace

extern "C" {

const char* shieldsim_version(void) { return "0.1.0"; }

const char* shieldsim_status_string(shieldsim_status status) {
  return shieldsim::error_code_name(static_cast<ErrorCode>(status));
}

const char* shieldsim_last_error(void) { return g_last_error.c_str(); }

void shieldsim_string_free(char* s) { std::free(s); }

shieldsim_status shieldsim_session_create(const char* options_json, shieldsim_session** out) {
  return guarded([&] {
    require(out != nullptr, "out is NULL");
    *out = nullptr;
    auto s = std::make_unique<shieldsim_session>();
    s->impl = std::make_unique<shieldsim::Session>(parse_session_options(options_json));
    *out = s.release();
  });
}

void shieldsim_session_destroy(shieldsim_session* s) { delete s; }

shieldsim_status shieldsim_session_counts_json(const shieldsim_session* s, char** out_json) {
  return guarded([&] {
    require(s != nullptr && out_json != nullptr, "NULL argument");
    nlohmann::json j = to_json(s->impl->snapshot_counts());
    nlohmann::json stages = nlohmann::json::object();
    for (const auto& [name, c] : s->impl->stage_counts()) stages[name] = to_json(c);
    j["stages"] = stages;
    *out_json = dup_string(j.dump());
  });
}

shieldsim_status shieldsim_session_transcript_json(const shieldsim_session* s,
                                                   int full_payloads, char** out_json) {
  return guarded([&] {
    require(s != nullptr && out_json != nullptr, "NULL argument");
    *out_json = dup_string(s->impl->transcript().to_json(full_payloads != 0).dump());
  });
}

shieldsim_status shieldsim_matrix_create(size_t rows, size_t cols, uint32_t prime,
                                         const uint32_t* data, shieldsim_matrix** out) {
  return guarded([&] {
    require(out != nullptr, "out is NULL");
    *out = nullptr;
    const shieldsim::FieldConfig cfg(prime);
    if (data == nullptr) {
      *out = new shieldsim_matrix{shieldsim::FieldMatrix(rows, cols, cfg)};
    } else {
      std::vector<shieldsim::Residue> v(data, data + rows * cols);
      *out = new shieldsim_matrix{shieldsim::FieldMatrix(rows, cols, std::move(v), cfg)};
    }
  });
}

shieldsim_status shieldsim_matrix_from_json(const char* json, shieldsim_matrix** out) {
  return guarded([&] {
    require(json != nullptr && out != nullptr, "NULL argument");
    *out = nullptr;
    *out = new shieldsim_matrix{shieldsim::field_matrix_from_json(nlohmann::json::parse(json))};
  });
}

shieldsim_status shieldsim_matrix_to_json(const shieldsim_matrix* m, char** out_json) {
  return guarded([&] {
    require(m != nullptr && out_json != nullptr, "NULL argument");
    *out_json = dup_string(to_json(m->impl).dump());
  });
}

void shieldsim_matrix_destroy(shieldsim_matrix* m) { delete m; }

size_t shieldsim_matrix_rows(const shieldsim_matrix* m) { return m ? m->impl.rows() : 0; }
size_t shieldsim_matrix_cols(const shieldsim_matrix* m) { return m ? m->impl.cols() : 0; }
const uint32_t* shieldsim_matrix_data(const shieldsim_matrix* m) {
  return m ? m->impl.data().data() : nullptr;
}

shieldsim_status shieldsim_oam_run(shieldsim_session* s, const shieldsim_matrix* q,
                                   const shieldsim_matrix* kt, int verify,
                                   shieldsim_matrix** out) {
  return guarded([&] {
    require(s && q && kt && out, "NULL argument");
    *out = nullptr;
    shieldsim::Session::StageScope scope(*s->impl, "attn-matmul");
    if (verify) {
      shieldsim::VerifiedMatrix r = verified_attn_matmul(*s->impl, q->impl, kt->impl);
      if (!r.outcome.pass) throw shieldsim::IntegrityViolation("attn-matmul", r.outcome.diagnostic);
      *out = new shieldsim_matrix{std::move(r.value)};
    } else {
      *out = new shieldsim_matrix{oam_run(*s->impl, q->impl, kt->impl)};
    }
  });
}

shieldsim_status shieldsim_additive_run(shieldsim_session* s, const shieldsim_matrix* x,
                                        const shieldsim_matrix* w, int verify,
                                        shieldsim_matrix** out) {
  return guarded([&] {
    require(s && x && w && out, "NULL argument");
    *out = nullptr;
    shieldsim::Session::StageScope scope(*s->impl, "additive");
    if (verify) {
      shieldsim::VerifiedMatrix r = verified_additive(*s->impl, x->impl, w->impl);
      if (!r.outcome.pass) throw shieldsim::IntegrityViolation("additive", r.outcome.diagnostic);
      *out = new shieldsim_matrix{std::move(r.value)};
    } else {
      shieldsim::AdditiveMask mask = ao_offline(*s->impl, w->impl, {x->impl.rows(), x->impl.cols()});
      *out = new shieldsim_matrix{ao_run(*s->impl, x->impl, w->impl, mask)};
    }
  });
}

shieldsim_status shieldsim_softmax_run(shieldsim_session* s, const double* x, size_t n,
                                       int verify, double* probs) {
  return guarded([&] {
    require(s && x && probs && n > 0, "NULL argument or empty input");
    shieldsim::Session::StageScope scope(*s->impl, "softmax");
    const std::span<const double> in(x, n);
    std::vector<double> p;
    if (verify) {
      shieldsim::VerifiedSoftmax r = verified_softmax(*s->impl, in);
      if (!r.outcome.pass) throw shieldsim::IntegrityViolation("softmax", r.outcome.diagnostic);
      p = std::move(r.result.probs);
    } else {
      p = osm_run(*s->impl, in).probs;
    }
    std::memcpy(probs, p.data(), n * sizeof(double));
  });
}

shieldsim_status shieldsim_cmd_run(const char* command, const char* options_json,
                                   char** report_json, int* exit_code) {
  return guarded([&] {
    require(command && report_json && exit_code, "NULL argument");
    *report_json = nullptr;
    (void)shieldsim::command_defaults(command);  // rejects unknown commands
    nlohmann::json options = nlohmann::json::object();
    if (options_json != nullptr && *options_json != '\0') {
      try {
        options = nlohmann::json::parse(options_json);
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kParse, std::string("options: ") + e.what());
      }
    }
    const shieldsim::CommandResult r = shieldsim::run_command(command, options);
    *report_json = dup_string(shieldsim::dump_report(r.report));
    *exit_code = r.exit_code;
  });
}

shieldsim_status shieldsim_cmd_defaults(const char* command, char** defaults_json) {
  return guarded([&] {
    require(command && defaults_json, "NULL argument");
    *defaults_json = dup_string(shieldsim::command_defaults(command).dump());
  });
}

shieldsim_status shieldsim_bench_csv(const char* report_json, char** csv) {
  return guarded([&] {
    require(report_json && csv, "NULL argument");
    *csv = dup_string(shieldsim::bench_csv(nlohmann::json::parse(report_json)));
  });
}

}  // extern "C"
