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

#ifndef SHIELDSIM_SHIELDSIM_H_
#define SHIELDSIM_SHIELDSIM_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define SHIELDSIM_API __declspec(dllexport)
#else
#define SHIELDSIM_API __attribute__((visibility("default")))
#endif

/* Status codes. Values are stable. */
typedef enum shieldsim_status {
  SHIELDSIM_OK = 0,
  SHIELDSIM_INVALID_ARGUMENT = 1,
  SHIELDSIM_DIMENSION_MISMATCH = 2,
  SHIELDSIM_ZERO_INVERSE = 3,
  SHIELDSIM_RANGE_OVERFLOW = 4,
  SHIELDSIM_EXPONENT_RANGE = 5,
  SHIELDSIM_MASK_REUSE = 6,
  SHIELDSIM_INTEGRITY_VIOLATION = 7,
  SHIELDSIM_DEGENERATE_VALUE = 8,
  SHIELDSIM_TOO_LARGE = 9,
  SHIELDSIM_NOT_PRIME = 10,
  SHIELDSIM_PARSE = 11,
  SHIELDSIM_INTERNAL = 99
} shieldsim_status;

typedef struct shieldsim_session shieldsim_session;
typedef struct shieldsim_matrix shieldsim_matrix;

SHIELDSIM_API const char* shieldsim_version(void);
SHIELDSIM_API const char* shieldsim_status_string(shieldsim_status status);

/* Message of the last failed call on this thread; "" if none. Valid until the
   next call on the same thread. */
SHIELDSIM_API const char* shieldsim_last_error(void);

/* Strings returned through char** out-parameters are malloc()ed here and
   released with shieldsim_string_free. */
SHIELDSIM_API void shieldsim_string_free(char* s);

/* Sessions. `options_json` may be NULL or an object with any of
   {"seed", "prime", "frac_bits", "exp_cap", "adversary", "keep_payloads"}. */
SHIELDSIM_API shieldsim_status shieldsim_session_create(const char* options_json,
                                                        shieldsim_session** out);
SHIELDSIM_API void shieldsim_session_destroy(shieldsim_session* s);
SHIELDSIM_API shieldsim_status shieldsim_session_counts_json(const shieldsim_session* s,
                                                             char** out_json);
SHIELDSIM_API shieldsim_status shieldsim_session_transcript_json(const shieldsim_session* s,
                                                                 int full_payloads,
                                                                 char** out_json);

/* Matrices over Z_p, row-major residues in [0, p). */
SHIELDSIM_API shieldsim_status shieldsim_matrix_create(size_t rows, size_t cols,
                                                       uint32_t prime,
                                                       const uint32_t* data,
                                                       shieldsim_matrix** out);
SHIELDSIM_API shieldsim_status shieldsim_matrix_from_json(const char* json,
                                                          shieldsim_matrix** out);
SHIELDSIM_API shieldsim_status shieldsim_matrix_to_json(const shieldsim_matrix* m,
                                                        char** out_json);
SHIELDSIM_API void shieldsim_matrix_destroy(shieldsim_matrix* m);
SHIELDSIM_API size_t shieldsim_matrix_rows(const shieldsim_matrix* m);
SHIELDSIM_API size_t shieldsim_matrix_cols(const shieldsim_matrix* m);
SHIELDSIM_API const uint32_t* shieldsim_matrix_data(const shieldsim_matrix* m);

/* Q * KT through OutAttnMult. With verify != 0 the hash row is embedded and
   a failed check returns SHIELDSIM_INTEGRITY_VIOLATION (no output). */
SHIELDSIM_API shieldsim_status shieldsim_oam_run(shieldsim_session* s,
                                                 const shieldsim_matrix* q,
                                                 const shieldsim_matrix* kt, int verify,
                                                 shieldsim_matrix** out);
/* X * W through additive outsourcing. */
SHIELDSIM_API shieldsim_status shieldsim_additive_run(shieldsim_session* s,
                                                      const shieldsim_matrix* x,
                                                      const shieldsim_matrix* w, int verify,
                                                      shieldsim_matrix** out);
/* Softmax of x[0..n) into probs[0..n) through OutSoftMax. */
SHIELDSIM_API shieldsim_status shieldsim_softmax_run(shieldsim_session* s, const double* x,
                                                     size_t n, int verify, double* probs);

/* Runs a CLI subcommand ("demo", "bench", "attack", "seclevel",
   "verify-compare", "matmul") with a JSON options object. The report is
   returned even when the command fails; *exit_code receives the process exit
   code the CLI would use. Returns non-OK only if the call itself could not be
   made (bad pointers, unknown command). */
SHIELDSIM_API shieldsim_status shieldsim_cmd_run(const char* command,
                                                 const char* options_json,
                                                 char** report_json, int* exit_code);

/* Canonical defaults for a subcommand, as JSON. */
SHIELDSIM_API shieldsim_status shieldsim_cmd_defaults(const char* command,
                                                      char** defaults_json);

/* Bench report JSON to CSV. */
SHIELDSIM_API shieldsim_status shieldsim_bench_csv(const char* report_json, char** csv);

#ifdef __cplusplus
}
#endif

#endif  /* SHIELDSIM_SHIELDSIM_H_ */
