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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace clarify {

enum class Theme { kTaxation, kEcology, kStateOrganization, kDemocracy };

inline constexpr std::array<Theme, 4> kAllThemes = {
    Theme::kTaxation, Theme::kEcology, Theme::kStateOrganization,
    Theme::kDemocracy};

enum class SegmentType { kStatement, kSolution, kPremise };

inline constexpr std::array<SegmentType, 3> kAllSegmentTypes = {
    SegmentType::kStatement, SegmentType::kSolution, SegmentType::kPremise};

enum class ErrorLabel {
  kOverAnalysis,
  kMiscomprehension,
  kOverSpecificity,
  kMisformulation,
};

enum class Phase { kPhase1, kPhase2, kAutomatic };
enum class RecordStatus { kCompleted, kSkipped };
enum class SkipReason { kNotUnderstandable, kHateSpeech, kTooLong, kPersonalInfo };

// Stable serialized names. Parsing throws Error(kParse) on unknown names.
std::string_view to_string(Theme v);
std::string_view to_string(SegmentType v);
std::string_view to_string(ErrorLabel v);
std::string_view to_string(Phase v);
std::string_view to_string(RecordStatus v);
std::string_view to_string(SkipReason v);

Theme parse_theme(std::string_view s);
SegmentType parse_segment_type(std::string_view s);
ErrorLabel parse_error_label(std::string_view s);
Phase parse_phase(std::string_view s);
RecordStatus parse_record_status(std::string_view s);
SkipReason parse_skip_reason(std::string_view s);

// Human-readable theme title used in prompts ("Taxation and Public Spending").
std::string_view theme_title(Theme v, std::string_view language = "en");

struct Contribution {
  std::string id;
  Theme theme = Theme::kTaxation;
  std::string text;  // UTF-8
  std::size_t sentence_count = 0;
  std::size_t char_length = 0;  // Unicode scalar values

  bool operator==(const Contribution&) const = default;
};

// Builds a contribution with char_length computed from the text.
Contribution make_contribution(std::string id, Theme theme, std::string text,
                               std::size_t sentence_count);

// Half-open range of Unicode scalar offsets.
struct CharSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  bool contains(const CharSpan& o) const {
    return start <= o.start && o.end <= end;
  }
  bool overlaps(const CharSpan& o) const {
    return start < o.end && o.start < end;
  }
  auto operator<=>(const CharSpan&) const = default;
};

struct LabeledSegment {
  CharSpan span;
  SegmentType kind = SegmentType::kStatement;

  bool operator==(const LabeledSegment&) const = default;
};

struct ArgumentativeUnit {
  std::vector<CharSpan> spans;  // sorted, pairwise disjoint
  std::vector<LabeledSegment> segments;
  std::optional<std::string> clarification;
  std::optional<std::string> source_model;

  bool operator==(const ArgumentativeUnit&) const = default;
};

struct ClarificationEvent {
  std::size_t au_index = 0;  // position in AnnotationRecord::units
  std::string backend;
  std::size_t attempt = 1;  // k, 1-based
  bool accepted = false;
  std::optional<double> observed_quality;  // present iff accepted
  std::set<ErrorLabel> error_labels;
  // Text pair the quality was computed from; kept for audit.
  std::optional<std::string> generated;
  std::optional<std::string> final_text;

  bool operator==(const ClarificationEvent&) const = default;
};

// Highest-priority label of a set, used when one dominant type is reported.
std::optional<ErrorLabel> dominant_label(const std::set<ErrorLabel>& labels);

struct AnnotationRecord {
  std::string contribution_id;
  std::string annotator_id;
  Phase phase = Phase::kPhase1;
  std::vector<ArgumentativeUnit> units;
  std::vector<ClarificationEvent> events;
  RecordStatus status = RecordStatus::kCompleted;
  std::optional<SkipReason> skip_reason;

  bool operator==(const AnnotationRecord&) const = default;
};

// Text of an AU: its spans in order joined with single spaces.
std::string unit_text(const ArgumentativeUnit& unit, std::string_view source);

}  // namespace clarify
