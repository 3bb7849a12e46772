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

#ifndef SHIELDSIM_SESSION_HPP_
#define SHIELDSIM_SESSION_HPP_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "shieldsim/field.hpp"
#include "shieldsim/op_counts.hpp"
#include "shieldsim/quantizer.hpp"
#include "shieldsim/rng.hpp"
#include "shieldsim/transcript.hpp"

namespace shieldsim {

// ---------------------------------------------------------------------------
// Adversary strategies for the untrusted worker.

enum class MatmulTamperMode { kSingleEntry, kRowSwap, kScaleAll };

struct Honest {};

// single-entry adds `magnitude` to one reply entry; row-swap exchanges two
// reply rows; scale-all multiplies every reply entry by `magnitude`.
struct MatmulTamper {
  MatmulTamperMode mode = MatmulTamperMode::kSingleEntry;
  Residue magnitude = 1;
};

// Multiplies one exponential reply by e^delta (attack a).
struct SoftmaxTamperA {
  double delta = 0.01;
  std::optional<std::size_t> index;
};

// Adds delta to one exponential reply (attack b).
struct SoftmaxTamperB {
  double delta = 1e7;
  std::optional<std::size_t> index;
};

// Exchanges two exponential replies (attack c).
struct SoftmaxSwap {
  std::optional<std::size_t> i;
  std::optional<std::size_t> j;
};

struct AdversaryStrategy {
  std::variant<Honest, MatmulTamper, SoftmaxTamperA, SoftmaxTamperB, SoftmaxSwap>
      variant;
  // Empty: tamper with every call of the matching kind. Otherwise only calls
  // made while the session is in this stage. The worker can tell protocol
  // steps apart from the call sequence, so this does not leak secrets.
  std::string target_stage;

  bool is_honest() const noexcept { return std::holds_alternative<Honest>(variant); }
  bool targets_matmul() const noexcept {
    return std::holds_alternative<MatmulTamper>(variant);
  }
  bool targets_softmax() const noexcept { return !is_honest() && !targets_matmul(); }

  // Canonical CLI spelling, e.g. "matmul-single:1@attn-matmul".
  std::string name() const;

  // Accepts: honest | matmul-single[:mag] | matmul-rowswap | matmul-scale[:c]
  // | softmax-a[:delta] | softmax-b[:delta] | softmax-swap[:i,j], each with an
  // optional "@stage" suffix. Throws Error{kInvalidArgument}.
  static AdversaryStrategy parse(std::string_view spec);
};

// One integrity check outcome, as reported by the CLI.
struct VerificationRecord {
  std::string check;  // "softmax" | "matmul" | "freivalds" | "additive"
  std::string stage;
  bool pass = true;
  std::uint64_t trusted_mults = 0;
};

// ---------------------------------------------------------------------------

struct SessionOptions {
  std::uint64_t seed = 1;
  Residue prime = kDefaultPrime;
  unsigned frac_bits = 8;
  double exp_cap = 700.0;
  AdversaryStrategy adversary;
  bool keep_payloads = true;
};

// The two-party stage. The trusted side owns `rng()` and every secret drawn
// from it; the worker only ever sees what passes through worker_matmul and
// worker_exp, all of which is recorded in the transcript.
class Session {
 public:
  explicit Session(const SessionOptions& options = {});

  const FieldConfig& field() const noexcept { return quant_.field(); }
  const QuantConfig& quant() const noexcept { return quant_; }
  SeededRng& rng() noexcept { return rng_; }
  SeededRng& adversary_rng() noexcept { return adversary_rng_; }
  const AdversaryStrategy& adversary() const noexcept { return adversary_; }
  double exp_cap() const noexcept { return exp_cap_; }
  std::uint64_t seed() const noexcept { return seed_; }

  // Trusted-side instrumentation, attributed to the current phase and stage.
  void count(OpKind kind, std::uint64_t amount);
  // Worker-side instrumentation; only the worker calls use it.
  void count_worker(std::uint64_t mults, std::uint64_t exps,
                    std::uint64_t sent, std::uint64_t received);

  OpCounts snapshot_counts() const { return counts_; }
  const std::map<std::string, OpCounts>& stage_counts() const noexcept {
    return stage_counts_;
  }
  // Wall time spent inside each StageScope, in milliseconds.
  const std::map<std::string, double>& stage_wall_ms() const noexcept {
    return stage_wall_ms_;
  }

  Transcript& transcript() noexcept { return transcript_; }
  const Transcript& transcript() const noexcept { return transcript_; }

  void record_verification(VerificationRecord r) {
    verifications_.push_back(std::move(r));
  }
  const std::vector<VerificationRecord>& verifications() const noexcept {
    return verifications_;
  }

  // Relative change |new - old| / |old| of every exponential reply the
  // adversary altered, in call order. Lets experiments tell effective
  // tampers from ones lost to rounding.
  void record_exp_tamper(double relative) { exp_tampers_.push_back(relative); }
  const std::vector<double>& exp_tampers() const noexcept { return exp_tampers_; }

  Phase phase() const noexcept { return phase_; }
  const std::string& stage() const noexcept { return stage_; }

  // RAII phase switch.
  class PhaseScope {
   public:
    PhaseScope(Session& s, Phase p) : s_(s), prev_(s.phase_) { s.phase_ = p; }
    ~PhaseScope() { s_.phase_ = prev_; }
    PhaseScope(const PhaseScope&) = delete;
    PhaseScope& operator=(const PhaseScope&) = delete;

   private:
    Session& s_;
    Phase prev_;
  };

  // RAII stage label; used for per-stage counts, transcript labels and
  // adversary targeting.
  class StageScope {
   public:
    StageScope(Session& s, std::string stage)
        : s_(s), prev_(s.stage_), start_(std::chrono::steady_clock::now()) {
      s.stage_ = std::move(stage);
    }
    ~StageScope() {
      const std::chrono::duration<double, std::milli> dt =
          std::chrono::steady_clock::now() - start_;
      s_.stage_wall_ms_[s_.stage_] += dt.count();
      s_.stage_ = std::move(prev_);
    }
    StageScope(const StageScope&) = delete;
    StageScope& operator=(const StageScope&) = delete;

   private:
    Session& s_;
    std::string prev_;
    std::chrono::steady_clock::time_point start_;
  };

 private:
  PhaseCounts& stage_phase_counts();

  std::uint64_t seed_;
  QuantConfig quant_;
  SeededRng rng_;
  SeededRng adversary_rng_;
  AdversaryStrategy adversary_;
  double exp_cap_;
  Phase phase_ = Phase::kOnline;
  std::string stage_;
  OpCounts counts_;
  std::map<std::string, OpCounts> stage_counts_;
  std::map<std::string, double> stage_wall_ms_;
  Transcript transcript_;
  std::vector<VerificationRecord> verifications_;
  std::vector<double> exp_tampers_;
};

inline void count_trusted(Session& s, OpKind kind, std::uint64_t amount) {
  s.count(kind, amount);
}
inline OpCounts snapshot_counts(const Session& s) { return s.snapshot_counts(); }

// In-TEE schoolbook product, counted as rows * inner * cols trusted mults.
FieldMatrix trusted_matmul(Session& s, const FieldMatrix& a, const FieldMatrix& b);

// The untrusted worker's matrix product. Records A, B and the reply in the
// transcript and applies the session's MatmulTamper strategy (if targeted).
FieldMatrix worker_matmul(Session& s, const FieldMatrix& a, const FieldMatrix& b);

// The untrusted worker's elementwise exponential. Throws ExponentRange if any
// |v_i| exceeds the session's exp_cap. Applies softmax-domain strategies.
std::vector<double> worker_exp(Session& s, std::span<const double> v);

}  // namespace shieldsim

#endif  // SHIELDSIM_SESSION_HPP_
