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

#include "shieldsim/session.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <utility>

#include "shieldsim/error.hpp"

namespace shieldsim {

namespace {

constexpr std::uint64_t kAdversaryStream = 0xAD5E12A7ULL;

template <typename... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <typename... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

[[noreturn]] void bad_spec(std::string_view spec, const std::string& why) {
  throw Error(ErrorCode::kInvalidArgument,
              "bad adversary spec '" + std::string(spec) + "': " + why);
}

double parse_double(std::string_view spec, std::string_view text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(std::string(text), &used);
    if (used != text.size()) bad_spec(spec, "trailing characters");
    return v;
  } catch (const std::logic_error&) {
    bad_spec(spec, "expected a number");
  }
}

std::uint64_t parse_uint(std::string_view spec, std::string_view text) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    bad_spec(spec, "expected a non-negative integer");
  }
  return v;
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string AdversaryStrategy::name() const {
  std::string base = std::visit(
      Overloaded{
          [](const Honest&) -> std::string { return "honest"; },
          [](const MatmulTamper& t) -> std::string {
            switch (t.mode) {
              case MatmulTamperMode::kSingleEntry:
                return "matmul-single:" + std::to_string(t.magnitude);
              case MatmulTamperMode::kRowSwap:
                return "matmul-rowswap";
              case MatmulTamperMode::kScaleAll:
                return "matmul-scale:" + std::to_string(t.magnitude);
            }
            return "matmul";
          },
          [](const SoftmaxTamperA& t) -> std::string {
            return "softmax-a:" + fmt_double(t.delta);
          },
          [](const SoftmaxTamperB& t) -> std::string {
            return "softmax-b:" + fmt_double(t.delta);
          },
          [](const SoftmaxSwap& t) -> std::string {
            if (t.i && t.j)
              return "softmax-swap:" + std::to_string(*t.i) + "," + std::to_string(*t.j);
            return "softmax-swap";
          },
      },
      variant);
  if (!target_stage.empty()) base += "@" + target_stage;
  return base;
}

AdversaryStrategy AdversaryStrategy::parse(std::string_view spec) {
  AdversaryStrategy out;
  std::string_view body = spec;
  if (const auto at = body.find('@'); at != std::string_view::npos) {
    out.target_stage = std::string(body.substr(at + 1));
    if (out.target_stage.empty()) bad_spec(spec, "empty stage after '@'");
    body = body.substr(0, at);
  }
  std::string_view head = body, arg;
  bool has_arg = false;
  if (const auto colon = body.find(':'); colon != std::string_view::npos) {
    head = body.substr(0, colon);
    arg = body.substr(colon + 1);
    has_arg = true;
  }

  if (head == "honest" || head == "none") {
    if (has_arg) bad_spec(spec, "honest takes no argument");
    out.variant = Honest{};
  } else if (head == "matmul-single") {
    MatmulTamper t{MatmulTamperMode::kSingleEntry, 1};
    if (has_arg) t.magnitude = static_cast<Residue>(parse_uint(spec, arg));
    if (t.magnitude == 0) bad_spec(spec, "magnitude must be nonzero");
    out.variant = t;
  } else if (head == "matmul-rowswap") {
    if (has_arg) bad_spec(spec, "matmul-rowswap takes no argument");
    out.variant = MatmulTamper{MatmulTamperMode::kRowSwap, 0};
  } else if (head == "matmul-scale") {
    MatmulTamper t{MatmulTamperMode::kScaleAll, 2};
    if (has_arg) t.magnitude = static_cast<Residue>(parse_uint(spec, arg));
    if (t.magnitude <= 1) bad_spec(spec, "scale factor must be >= 2");
    out.variant = t;
  } else if (head == "softmax-a") {
    SoftmaxTamperA t;
    if (has_arg) t.delta = parse_double(spec, arg);
    out.variant = t;
  } else if (head == "softmax-b") {
    SoftmaxTamperB t;
    if (has_arg) t.delta = parse_double(spec, arg);
    out.variant = t;
  } else if (head == "softmax-swap") {
    SoftmaxSwap t;
    if (has_arg) {
      const auto comma = arg.find(',');
      if (comma == std::string_view::npos) bad_spec(spec, "expected i,j");
      t.i = parse_uint(spec, arg.substr(0, comma));
      t.j = parse_uint(spec, arg.substr(comma + 1));
    }
    out.variant = t;
  } else {
    bad_spec(spec, "unknown strategy");
  }
  return out;
}

// ---------------------------------------------------------------------------

Session::Session(const SessionOptions& options)
    : seed_(options.seed),
      quant_(options.frac_bits, FieldConfig(options.prime)),
      rng_(options.seed),
      adversary_rng_(SeededRng::derive(options.seed, kAdversaryStream)),
      adversary_(options.adversary),
      exp_cap_(options.exp_cap),
      transcript_(options.keep_payloads) {
  if (!(exp_cap_ > 0.0) || exp_cap_ > 709.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "exp_cap must lie in (0, 709] for double-precision exponentials");
  }
}

PhaseCounts& Session::stage_phase_counts() {
  return stage_counts_[stage_.empty() ? std::string("(none)") : stage_].at(phase_);
}

void Session::count(OpKind kind, std::uint64_t amount) {
  auto bump = [&](PhaseCounts& c) {
    switch (kind) {
      case OpKind::kMult: c.trusted_mults += amount; break;
      case OpKind::kAdd: c.trusted_adds += amount; break;
      case OpKind::kDiv: c.trusted_divs += amount; break;
      case OpKind::kExp: c.trusted_exps += amount; break;
      case OpKind::kCmp: c.trusted_cmps += amount; break;
      case OpKind::kVecMat: c.trusted_vecmats += amount; break;
    }
  };
  bump(counts_.at(phase_));
  bump(stage_phase_counts());
}

void Session::count_worker(std::uint64_t mults, std::uint64_t exps,
                           std::uint64_t sent, std::uint64_t received) {
  for (PhaseCounts* c : {&counts_.at(phase_), &stage_phase_counts()}) {
    c->worker_mults += mults;
    c->worker_exps += exps;
    c->elements_sent += sent;
    c->elements_received += received;
  }
}

// ---------------------------------------------------------------------------

FieldMatrix trusted_matmul(Session& s, const FieldMatrix& a, const FieldMatrix& b) {
  FieldMatrix c = mat_mul_mod(a, b);
  s.count(OpKind::kMult, a.rows() * a.cols() * b.cols());
  if (a.cols() > 0) s.count(OpKind::kAdd, a.rows() * (a.cols() - 1) * b.cols());
  return c;
}

namespace {

bool stage_targeted(const Session& s) {
  const auto& target = s.adversary().target_stage;
  return target.empty() || target == s.stage();
}

void tamper_matmul(Session& s, const MatmulTamper& t, FieldMatrix& reply) {
  const FieldConfig& f = reply.field();
  SeededRng& arng = s.adversary_rng();
  auto add_at_random = [&](Residue mag) {
    const std::size_t idx = arng.uniform_below(reply.size());
    auto d = reply.mutable_data();
    d[idx] = f.add(d[idx], mag % f.p());
  };
  switch (t.mode) {
    case MatmulTamperMode::kSingleEntry:
      add_at_random(t.magnitude);
      break;
    case MatmulTamperMode::kRowSwap: {
      if (reply.rows() >= 2) {
        const std::size_t i = arng.uniform_below(reply.rows());
        std::size_t j = arng.uniform_below(reply.rows() - 1);
        if (j >= i) ++j;
        for (std::size_t c = 0; c < reply.cols(); ++c)
          std::swap(reply(i, c), reply(j, c));
      } else if (reply.cols() >= 2) {
        const std::size_t i = arng.uniform_below(reply.cols());
        std::size_t j = arng.uniform_below(reply.cols() - 1);
        if (j >= i) ++j;
        std::swap(reply(0, i), reply(0, j));
      } else {
        add_at_random(1);
      }
      break;
    }
    case MatmulTamperMode::kScaleAll:
      for (auto& e : reply.mutable_data()) e = f.mul(e, t.magnitude % f.p());
      break;
  }
}

}  // namespace

FieldMatrix worker_matmul(Session& s, const FieldMatrix& a, const FieldMatrix& b) {
  s.transcript().record(Direction::kToWorker, s.stage(), a);
  s.transcript().record(Direction::kToWorker, s.stage(), b);
  FieldMatrix reply = mat_mul_mod(a, b);
  s.count_worker(a.rows() * a.cols() * b.cols(), 0, a.size() + b.size(),
                 reply.size());
  if (const auto* t = std::get_if<MatmulTamper>(&s.adversary().variant);
      t != nullptr && stage_targeted(s)) {
    tamper_matmul(s, *t, reply);
  }
  s.transcript().record(Direction::kFromWorker, s.stage(), reply);
  return reply;
}

std::vector<double> worker_exp(Session& s, std::span<const double> v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(std::abs(v[i]) <= s.exp_cap())) {
      std::ostringstream os;
      os << "worker_exp: |v[" << i << "]| = " << std::abs(v[i])
         << " exceeds exp_cap " << s.exp_cap();
      throw Error(ErrorCode::kExponentRange, os.str());
    }
  }
  s.transcript().record(Direction::kToWorker, s.stage(), v);
  std::vector<double> reply(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) reply[i] = std::exp(v[i]);
  s.count_worker(0, v.size(), v.size(), reply.size());

  if (!reply.empty() && stage_targeted(s)) {
    SeededRng& arng = s.adversary_rng();
    auto pick = [&](std::optional<std::size_t> fixed) {
      return fixed ? *fixed % reply.size() : arng.uniform_below(reply.size());
    };
    std::visit(
        Overloaded{
            [](const Honest&) {},
            [](const MatmulTamper&) {},
            [&](const SoftmaxTamperA& t) {
              const std::size_t i = pick(t.index);
              const double before = reply[i];
              reply[i] *= std::exp(t.delta);
              s.record_exp_tamper(std::abs(reply[i] - before) / std::abs(before));
            },
            [&](const SoftmaxTamperB& t) {
              const std::size_t i = pick(t.index);
              const double before = reply[i];
              reply[i] += t.delta;
              s.record_exp_tamper(std::abs(reply[i] - before) / std::abs(before));
            },
            [&](const SoftmaxSwap& t) {
              if (reply.size() < 2) return;
              std::size_t i, j;
              if (t.i && t.j) {
                i = *t.i % reply.size();
                j = *t.j % reply.size();
              } else {
                i = arng.uniform_below(reply.size());
                j = arng.uniform_below(reply.size() - 1);
                if (j >= i) ++j;
              }
              const double before = reply[i];
              std::swap(reply[i], reply[j]);
              s.record_exp_tamper(std::abs(reply[i] - before) / std::abs(before));
            },
        },
        s.adversary().variant);
  }
  s.transcript().record(Direction::kFromWorker, s.stage(), reply);
  return reply;
}

}  // namespace shieldsim
