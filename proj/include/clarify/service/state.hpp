// Copyright 2026 The Clarify Authors.
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

#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "clarify/core/json_io.hpp"
#include "clarify/core/types.hpp"

namespace clarify::service {

// Journal event types.
namespace event {
inline constexpr const char* kTutorialSubmitted = "tutorial_submitted";
inline constexpr const char* kAssigned = "assigned";
inline constexpr const char* kRegenerated = "regenerated";
inline constexpr const char* kSubmitted = "submitted";
inline constexpr const char* kSkipped = "skipped";
inline constexpr const char* kLeaseExpired = "lease_expired";
inline constexpr const char* kExported = "exported";
}  // namespace event

struct Lease {
  std::string annotator;
  Phase phase = Phase::kPhase1;
  std::int64_t expires_ms = 0;
  std::uint64_t seq = 0;  // sequence number of the assignment

  bool operator==(const Lease&) const = default;
};

struct GeneratedAttempt {
  std::size_t attempt = 1;
  std::string backend;
  std::string text;

  bool operator==(const GeneratedAttempt&) const = default;
};

// Clarifications generated for one annotator's work on one contribution,
// keyed by AU index. Kept across lease expiry.
using Draft = std::map<std::size_t, std::vector<GeneratedAttempt>>;

struct AccountProgress {
  std::size_t tutorial_passed = 0;  // items validated so far
  std::size_t completed = 0;        // submitted or skipped tasks

  bool operator==(const AccountProgress&) const = default;
};

using Key = std::pair<std::string, std::string>;  // (contribution id, annotator id)

struct ServiceState {
  std::uint64_t last_seq = 0;
  std::int64_t last_ts = 0;
  std::map<std::string, AccountProgress> accounts;  // by annotator id
  std::map<std::string, Lease> leases;              // by contribution id
  std::map<Key, AnnotationRecord> records;          // latest per key
  std::map<Key, Draft> drafts;
  std::map<std::string, std::size_t> done;          // finished annotations per contribution
  std::size_t assignments = 0;
  std::size_t exports = 0;

  bool operator==(const ServiceState&) const = default;

  // The contribution leased to an annotator, if any.
  std::optional<std::string> lease_of(const std::string& annotator) const;
};

Json to_json(const ServiceState& s);
ServiceState state_from_json(const Json& j);

// Applies one journal event. Events are validated before they are written,
// so apply only rejects malformed or out-of-sequence input (kCorruption).
void apply(ServiceState& s, const Json& event);

// Append-only JSON-lines journal. A torn or unparsable last line (a crash
// mid-write) is dropped and truncated on open; damage before the last line
// and sequence gaps are kCorruption.
class Journal {
 public:
  explicit Journal(std::filesystem::path path, bool sync = false);
  ~Journal();
  Journal(const Journal&) = delete;
  Journal& operator=(const Journal&) = delete;

  // Events read when the journal was opened.
  const std::vector<Json>& existing() const { return existing_; }
  void append(const Json& event);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  bool sync_;
  std::FILE* file_ = nullptr;
  std::vector<Json> existing_;
};

// Reads and validates journal lines without opening for append.
std::vector<Json> read_journal(const std::filesystem::path& path, bool truncate_torn_tail);

// Replays events over an optional snapshot; events at or below the
// snapshot's sequence number are skipped.
ServiceState replay(const std::vector<Json>& events, std::optional<ServiceState> snapshot = std::nullopt);

void write_snapshot(const std::filesystem::path& path, const ServiceState& s);
std::optional<ServiceState> read_snapshot(const std::filesystem::path& path);

}  // namespace clarify::service
