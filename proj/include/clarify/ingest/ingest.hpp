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
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "clarify/core/types.hpp"

namespace clarify::ingest {

struct RawContribution {
  std::string id;
  std::string theme;  // free-form label, resolved by parse_theme_label
  std::string text;
  std::size_t line = 0;  // source line, for error messages
};

// Accepts the canonical theme names, the English and French theme titles and
// a few short forms ("fiscalité", "écologie", ...). Case-insensitive.
Theme parse_theme_label(const std::string& label);

// RFC 4180 CSV with a header naming at least theme and text; id is optional
// and defaults to "c<row>" (1-based data row). Throws Error(kParse) with the
// line number on malformed input.
std::vector<RawContribution> read_csv(std::istream& in, const std::string& name);

// JSON lines with fields id (optional), theme, text.
std::vector<RawContribution> read_jsonl(std::istream& in, const std::string& name);

// Dispatches on the extension (.csv, otherwise JSON lines).
std::vector<RawContribution> read_raw(const std::filesystem::path& path);

struct IngestConfig {
  std::size_t min_chars = 30;
  std::size_t max_chars = 600;
  // Sentence-count bin edges; bin i holds counts in [edges[i], edges[i+1]),
  // the last bin is open-ended and counts below edges[0] fall in bin 0.
  std::vector<std::size_t> length_bins{1, 2, 3, 4, 5};
  std::optional<std::size_t> sample_size;
  std::uint64_t seed = 0;
};

// Throws Error(kInvalidArgument) when the invariants do not hold.
void check_config(const IngestConfig& cfg);

std::size_t length_bin(std::size_t sentence_count, const std::vector<std::size_t>& edges);

struct CorpusSummary {
  std::size_t input = 0;
  std::size_t kept = 0;
  std::size_t deduplicated = 0;
  std::size_t filtered = 0;  // outside [min_chars, max_chars]
  std::size_t too_short = 0;
  std::size_t too_long = 0;
  std::map<Theme, std::size_t> per_theme;
  std::vector<std::size_t> length_histogram;  // kept contributions per bin
};

struct PreparedCorpus {
  std::vector<Contribution> contributions;  // sorted by id
  CorpusSummary summary;
};

// Trims texts, drops exact duplicates (first occurrence wins), then drops
// texts whose length in characters falls outside [min_chars, max_chars].
PreparedCorpus prepare_corpus(const std::vector<RawContribution>& raw, const IngestConfig& cfg);

PreparedCorpus prepare_corpus(const std::vector<Contribution>& corpus, const IngestConfig& cfg);

struct SampleResult {
  std::vector<Contribution> contributions;
  std::vector<std::string> warnings;
};

// Draws sample_size contributions spread as evenly as possible over the
// non-empty (theme, length bin) cells; cells too small to reach the common
// level are taken whole. Without sample_size the corpus is shuffled.
SampleResult stratified_sample(const std::vector<Contribution>& corpus, const IngestConfig& cfg);

nlohmann::json to_json(const CorpusSummary& s, const std::vector<std::size_t>& edges);

}  // namespace clarify::ingest
