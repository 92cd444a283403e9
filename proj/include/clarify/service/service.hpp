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
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "clarify/core/json_io.hpp"
#include "clarify/core/types.hpp"
#include "clarify/llm/backend.hpp"
#include "clarify/service/state.hpp"

namespace clarify::service {

struct Account {
  std::string id;     // annotator id written into records
  std::string token;  // secret
  std::string name;   // display name, defaults to id
};

// A tutorial contribution with its reference segmentation.
struct TutorialItem {
  Contribution contribution;
  std::vector<ArgumentativeUnit> gold;
};

struct CampaignConfig {
  std::string name = "campaign";
  std::filesystem::path corpus;    // contributions JSONL
  std::filesystem::path accounts;  // JSON array of {"id", "token"}
  std::filesystem::path tutorial;  // JSONL of {"contribution", "units"}
  std::filesystem::path data_dir;  // journal.jsonl and snapshot.json
  std::vector<llm::BackendConfig> backends;
  std::vector<std::string> pool;  // backend names used for clarification
  double overlap_fraction = 0.0;
  double phase2_start_fraction = 0.75;
  std::optional<std::size_t> quota;  // per annotator
  std::uint64_t seed = 0;
  double lease_minutes = 60.0;
  double tutorial_lambda = 0.5;
  double tutorial_min_f1 = 0.8;
  std::size_t snapshot_interval = 500;  // events between snapshots, 0 = never
  std::string language = "fr";
  std::string admin_token_env = "CLARIFY_ADMIN_TOKEN";
};

void check_campaign(const CampaignConfig& c);
void to_json(Json& j, const CampaignConfig& c);
void from_json(const Json& j, CampaignConfig& c);
// Relative paths resolve against the file's directory.
CampaignConfig load_campaign(const std::filesystem::path& path);

std::vector<Account> read_accounts(const std::filesystem::path& path);
std::vector<TutorialItem> read_tutorial(const std::filesystem::path& path);

// Contribution ids annotated twice: the round(fraction * N) ids with the
// smallest seeded hash.
std::set<std::string> select_doubles(const std::vector<Contribution>& corpus, double fraction, std::uint64_t seed);

using Clock = std::function<std::int64_t()>;  // milliseconds
std::int64_t system_clock_ms();

struct ServiceOptions {
  Clock clock;               // defaults to the system clock
  std::string admin_token;   // empty: admin endpoints always refuse
  bool sync_journal = false; // fsync after every event
};

struct Task {
  enum class Kind { kTutorial, kTask, kNone };
  Kind kind = Kind::kNone;
  Contribution contribution;
  std::size_t tutorial_index = 0;
  std::size_t tutorial_total = 0;
  Phase phase = Phase::kPhase1;
  std::int64_t expires_ms = 0;
  Draft draft;  // clarifications generated so far
};

struct Regeneration {
  std::string text;
  std::size_t attempt = 1;
  std::string backend;
  std::optional<ClarificationEvent> superseded;  // rejected previous attempt
};

struct SubmitResult {
  bool accepted = false;
  std::vector<Violation> violations;
  std::optional<AnnotationRecord> record;
  // Tutorial submissions only.
  std::optional<double> tutorial_f1;
  bool tutorial_passed = false;
};

struct AccountInfo {
  std::string id;
  std::string name;
  std::size_t tutorial_progress = 0;
  std::size_t tutorial_total = 0;
  bool tutorial_passed = false;
  std::size_t completed = 0;
};

struct ExportFilter {
  std::optional<std::string> campaign;
  std::optional<Phase> phase;
  std::optional<std::string> annotator;
};

struct ExportData {
  std::vector<AnnotationRecord> records;  // by (contribution id, annotator id)
  std::vector<Json> events;               // quality-model event rows
};

// Exported event row: contribution_id, annotator_id, phase, au_index,
// backend, attempt, accepted, observed_quality, error_labels, generated,
// final_text.
std::vector<Json> event_rows(const AnnotationRecord& record);

class AnnotationService {
 public:
  AnnotationService(CampaignConfig cfg, std::vector<Contribution> corpus, std::vector<Account> accounts,
                    std::vector<TutorialItem> tutorial,
                    std::map<std::string, std::shared_ptr<llm::ChatBackend>> backends, ServiceOptions opts);

  // Loads corpus, accounts, tutorial and backends named by the config. The
  // admin token is read from cfg.admin_token_env unless opts sets one.
  static std::unique_ptr<AnnotationService> open(const CampaignConfig& cfg, ServiceOptions opts = {});

  // Annotator id for a token; Error(kAuthentication) otherwise.
  std::string authenticate(const std::string& token) const;
  // Error(kAuthorization) unless token is the admin token.
  void require_admin(const std::string& token) const;

  AccountInfo account(const std::string& annotator) const;
  Task next_task(const std::string& annotator);
  Regeneration regenerate(const std::string& annotator, const std::string& contribution_id, std::size_t au_index,
                          const ArgumentativeUnit& unit);
  SubmitResult submit(const std::string& annotator, AnnotationRecord record);
  AnnotationRecord skip(const std::string& annotator, const std::string& contribution_id, SkipReason reason);

  std::vector<AnnotationRecord> my_annotations(const std::string& annotator) const;
  std::vector<AnnotationRecord> records(const ExportFilter& filter) const;
  // Journals the export.
  ExportData export_dataset(const ExportFilter& filter);

  ServiceState state() const;
  const std::set<std::string>& doubles() const { return doubles_; }
  std::size_t target(const std::string& contribution_id) const;
  const CampaignConfig& config() const { return cfg_; }
  const Contribution* find_contribution(const std::string& id) const;
  void snapshot();

 private:
  std::int64_t now() const;
  void commit(Json event);
  void expire_leases(std::int64_t now);
  const AccountProgress& progress(const std::string& annotator) const;
  bool tutorial_done(const std::string& annotator) const;
  void require_tutorial(const std::string& annotator) const;
  const Lease& held_lease(const std::string& annotator, const std::string& contribution_id, std::int64_t now);
  std::string pick_backend(const std::string& cid, const std::string& annotator, std::size_t au,
                           std::size_t attempt) const;
  SubmitResult submit_tutorial(const std::string& annotator, const AnnotationRecord& record, std::size_t index);

  CampaignConfig cfg_;
  std::vector<Contribution> corpus_;
  std::map<std::string, std::size_t> corpus_index_;
  std::map<std::string, std::string> token_to_id_;
  std::map<std::string, std::string> names_;
  std::vector<TutorialItem> tutorial_;
  std::map<std::string, std::shared_ptr<llm::ChatBackend>> backends_;
  ServiceOptions opts_;
  std::set<std::string> doubles_;
  std::map<std::string, std::uint64_t> rank_;

  mutable std::shared_mutex mu_;
  ServiceState state_;
  std::unique_ptr<Journal> journal_;
  std::uint64_t since_snapshot_ = 0;
};

}  // namespace clarify::service
