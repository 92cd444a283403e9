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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "clarify/core/json_io.hpp"
#include "clarify/core/types.hpp"
#include "clarify/llm/backend.hpp"
#include "clarify/pipeline/align.hpp"

namespace clarify::pipeline {

inline constexpr const char* kPipelineAnnotator = "pipeline";

struct PipelineConfig {
  std::vector<llm::BackendConfig> backends;
  std::string au_backend;             // backend name per stage
  std::string as_backend;
  std::string clarification_backend;
  std::string language = "fr";
  bool one_shot = false;
  std::size_t max_parallel = 1;
  std::size_t checkpoint_interval = 10;  // contributions per checkpoint shard
  std::uint64_t seed = 0;                // dispatch order only
};

// Throws Error(kInvalidArgument) on a violated invariant.
void check_config(const PipelineConfig& c);
void to_json(Json& j, const PipelineConfig& c);
// {"backends": [...], "stages": {"au_extraction": name, "as_detection": name,
//  "clarification": name}, "language", "one_shot", "max_parallel",
//  "checkpoint_interval", "seed"}
void from_json(const Json& j, PipelineConfig& c);
// Relative transcript paths resolve against the config file's directory.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

struct StageBackends {
  llm::ChatBackend* au_extraction = nullptr;
  llm::ChatBackend* as_detection = nullptr;
  llm::ChatBackend* clarification = nullptr;
};

struct UnitCounts {
  std::size_t units = 0;  // kept in the record
  std::size_t fuzzy = 0;
  std::size_t failed = 0;
  std::size_t overlapping = 0;
  std::size_t without_segments = 0;
  std::size_t statements = 0;
  std::size_t solutions = 0;
  std::size_t premises = 0;
  std::size_t segments_dropped = 0;
  std::size_t reprompts = 0;
  std::size_t misformulations = 0;

  UnitCounts& operator+=(const UnitCounts& o);
  bool operator==(const UnitCounts&) const = default;
};

void to_json(Json& j, const UnitCounts& c);
void from_json(const Json& j, UnitCounts& c);

struct AlignmentLog {
  std::size_t unit = 0;                  // position in the extraction output
  std::optional<std::size_t> au_index;   // position in the record, if kept
  AlignStatus status = AlignStatus::kFailed;
  double coverage = 0.0;
  std::string note;  // why a unit was dropped

  bool operator==(const AlignmentLog&) const = default;
};

struct Quarantine {
  std::string stage;
  std::string reason;
  std::string raw;

  bool operator==(const Quarantine&) const = default;
};

struct ContributionOutcome {
  std::string contribution_id;
  std::optional<AnnotationRecord> record;
  std::optional<Quarantine> quarantine;
  std::vector<AlignmentLog> alignment;
  UnitCounts counts;

  bool operator==(const ContributionOutcome&) const = default;
};

void to_json(Json& j, const ContributionOutcome& o);
void from_json(const Json& j, ContributionOutcome& o);

struct StageOptions {
  std::string language = "fr";
  bool one_shot = false;
};

// Extraction, structure detection and clarification for one contribution.
// A parse failure is re-prompted once; a second failure quarantines the
// contribution. Backend errors are rethrown with the contribution id.
ContributionOutcome process_contribution(const Contribution& c, const StageBackends& backends,
                                         const StageOptions& opts = {});

struct RunOptions {
  std::filesystem::path out_dir;
  // Stop after this many newly processed contributions, leaving the
  // checkpoint unfinalized (simulated interruption).
  std::optional<std::size_t> stop_after;
  // Discard a corrupt checkpoint and start over instead of refusing.
  bool discard_corrupt_checkpoint = false;
};

struct RunReport {
  std::size_t contributions = 0;
  std::size_t records = 0;
  std::size_t quarantined = 0;
  UnitCounts counts;
  std::string config_hash;
  // Not serialized: they depend on how the run was split.
  std::size_t resumed = 0;
  std::size_t processed = 0;
  bool finished = false;
};

Json to_json(const RunReport& r);

struct RunOutput {
  std::vector<AnnotationRecord> records;  // sorted by contribution id
  RunReport report;
};

// Output files in out_dir: records.jsonl, quarantine.jsonl, alignment.jsonl
// and report.json, all sorted by contribution id. Progress is kept in
// out_dir/checkpoint and already processed ids are skipped on the next run.
RunOutput run_corpus(const std::vector<Contribution>& corpus, const PipelineConfig& cfg,
                     const std::map<std::string, std::shared_ptr<llm::ChatBackend>>& backends,
                     const RunOptions& opts);
// Builds the backends from cfg.
RunOutput run_corpus(const std::vector<Contribution>& corpus, const PipelineConfig& cfg,
                     const RunOptions& opts);

}  // namespace clarify::pipeline
