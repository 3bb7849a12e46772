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

#ifndef SHIELDSIM_TRANSCRIPT_HPP_
#define SHIELDSIM_TRANSCRIPT_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "shieldsim/field.hpp"

namespace shieldsim {

enum class Direction { kToWorker, kFromWorker };
enum class PayloadKind { kFieldMatrix, kRealVector };

// One message crossing the trust boundary. The digest is FNV-1a/64 over the
// little-endian element bytes (4 bytes per residue, 8 per IEEE double).
struct Message {
  Direction direction;
  PayloadKind kind;
  std::string stage;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Residue> field_payload;
  std::vector<double> real_payload;
  std::uint64_t digest = 0;
};

std::uint64_t payload_digest(std::span<const Residue> data) noexcept;
std::uint64_t payload_digest(std::span<const double> data) noexcept;

// Append-only record of everything the untrusted worker sees.
class Transcript {
 public:
  // When `keep_payloads` is false only shapes and digests are retained.
  explicit Transcript(bool keep_payloads = true) : keep_payloads_(keep_payloads) {}

  void record(Direction dir, std::string stage, const FieldMatrix& m);
  void record(Direction dir, std::string stage, std::span<const double> v);

  const std::vector<Message>& messages() const noexcept { return messages_; }
  std::size_t size() const noexcept { return messages_.size(); }
  bool keeps_payloads() const noexcept { return keep_payloads_; }

  nlohmann::json to_json(bool full_payloads) const;

 private:
  bool keep_payloads_;
  std::vector<Message> messages_;
};

}  // namespace shieldsim

#endif  // SHIELDSIM_TRANSCRIPT_HPP_
