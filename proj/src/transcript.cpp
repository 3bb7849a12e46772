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

#include "shieldsim/transcript.hpp"

#include <bit>
#include <cstring>
#include <iomanip>
#include <sstream>

#include "shieldsim/op_counts.hpp"

namespace shieldsim {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

template <typename Word>
std::uint64_t fnv_words(std::span<const Word> words) noexcept {
  std::uint64_t h = kFnvOffset;
  for (Word w : words) {
    for (std::size_t b = 0; b < sizeof(Word); ++b) {
      h ^= static_cast<std::uint8_t>(w >> (8 * b));
      h *= kFnvPrime;
    }
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

}  // namespace

std::uint64_t payload_digest(std::span<const Residue> data) noexcept {
  return fnv_words(data);
}

std::uint64_t payload_digest(std::span<const double> data) noexcept {
  std::vector<std::uint64_t> bits(data.size());
  for (std::size_t i = 0; i < data.size(); ++i)
    bits[i] = std::bit_cast<std::uint64_t>(data[i]);
  return fnv_words(std::span<const std::uint64_t>(bits));
}

void Transcript::record(Direction dir, std::string stage, const FieldMatrix& m) {
  Message msg{dir, PayloadKind::kFieldMatrix, std::move(stage), m.rows(),
              m.cols(), {}, {}, payload_digest(m.data())};
  if (keep_payloads_) msg.field_payload.assign(m.data().begin(), m.data().end());
  messages_.push_back(std::move(msg));
}

void Transcript::record(Direction dir, std::string stage,
                        std::span<const double> v) {
  Message msg{dir, PayloadKind::kRealVector, std::move(stage), 1, v.size(),
              {}, {}, payload_digest(v)};
  if (keep_payloads_) msg.real_payload.assign(v.begin(), v.end());
  messages_.push_back(std::move(msg));
}

nlohmann::json Transcript::to_json(bool full_payloads) const {
  nlohmann::json list = nlohmann::json::array();
  for (const Message& m : messages_) {
    nlohmann::json j = {
        {"direction", m.direction == Direction::kToWorker ? "to-worker" : "from-worker"},
        {"kind", m.kind == PayloadKind::kFieldMatrix ? "field-matrix" : "real-vector"},
        {"stage", m.stage},
        {"rows", m.rows},
        {"cols", m.cols},
        {"digest", hex64(m.digest)},
    };
    if (full_payloads && keep_payloads_) {
      if (m.kind == PayloadKind::kFieldMatrix)
        j["payload"] = m.field_payload;
      else
        j["payload"] = m.real_payload;
    }
    list.push_back(std::move(j));
  }
  return {{"messages", std::move(list)}};
}

// ---------------------------------------------------------------------------

PhaseCounts& PhaseCounts::operator+=(const PhaseCounts& o) noexcept {
  trusted_mults += o.trusted_mults;
  trusted_adds += o.trusted_adds;
  trusted_divs += o.trusted_divs;
  trusted_exps += o.trusted_exps;
  trusted_cmps += o.trusted_cmps;
  trusted_vecmats += o.trusted_vecmats;
  worker_mults += o.worker_mults;
  worker_exps += o.worker_exps;
  elements_sent += o.elements_sent;
  elements_received += o.elements_received;
  return *this;
}

nlohmann::json to_json(const PhaseCounts& c) {
  return {{"trusted_mults", c.trusted_mults},
          {"trusted_adds", c.trusted_adds},
          {"trusted_divs", c.trusted_divs},
          {"trusted_exps", c.trusted_exps},
          {"trusted_cmps", c.trusted_cmps},
          {"trusted_vecmats", c.trusted_vecmats},
          {"worker_mults", c.worker_mults},
          {"worker_exps", c.worker_exps},
          {"elements_sent", c.elements_sent},
          {"elements_received", c.elements_received}};
}

nlohmann::json to_json(const OpCounts& c) {
  return {{"offline", to_json(c.offline)}, {"online", to_json(c.online)}};
}

}  // namespace shieldsim
