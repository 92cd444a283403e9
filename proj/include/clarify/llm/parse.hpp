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

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "clarify/core/error.hpp"
#include "clarify/core/types.hpp"

namespace clarify::llm {

// Parse failure that keeps the model output for quarantine and re-prompting.
class StageParseError : public Error {
 public:
  StageParseError(const std::string& what, std::string raw)
      : Error(ErrorCode::kParse, what), raw_(std::move(raw)) {}
  const std::string& raw() const { return raw_; }

 private:
  std::string raw_;
};

enum class Verdict { kA, kB, kTie };

const char* to_string(Verdict v);

// Maps tag and verdict spellings (any case) to canonical values. Loaded from
// JSON so localized prompts need no code change:
//   {"segment_tags": {"STATEMENT": "statement", ...},
//    "verdicts": {"A": "a", "TIE": "tie", ...}}
class TagTable {
 public:
  static const TagTable& builtin();
  static TagTable from_json(const nlohmann::json& j);

  std::optional<SegmentType> segment_type(std::string_view tag) const;
  std::optional<Verdict> verdict(std::string_view word) const;

 private:
  std::map<std::string, SegmentType> tags_;
  std::map<std::string, Verdict> verdicts_;
};

// Lines starting with "-" after optional indentation; the bullet and
// surrounding whitespace are removed and empty items dropped.
std::vector<std::string> parse_unit_list(const std::string& raw);

struct TypedSegment {
  SegmentType type = SegmentType::kStatement;
  std::string text;

  bool operator==(const TypedSegment&) const = default;
};

// Lines of the form "- [TAG] text". Lines with unknown tags are skipped.
std::vector<TypedSegment> parse_typed_segments(const std::string& raw,
                                               const TagTable& tags = TagTable::builtin());

struct ParsedClarification {
  std::string text;
  bool misformulation = false;       // something was stripped
  std::vector<std::string> stripped;  // removed fragments, outermost first
};

// Removes known preambles ("Voici ... :", "L'argument clair ... est :") and
// wrapping markdown emphasis or quotes, repeatedly until nothing changes.
ParsedClarification parse_clarification(const std::string& raw);

Verdict parse_verdict(const std::string& raw, const TagTable& tags = TagTable::builtin());

}  // namespace clarify::llm
