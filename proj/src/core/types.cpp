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

#include "clarify/core/types.hpp"

#include <algorithm>

#include "clarify/core/error.hpp"
#include "clarify/core/utf8.hpp"

namespace clarify {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kProtocol: return "protocol";
    case ErrorCode::kBackend: return "backend";
    case ErrorCode::kAuthentication: return "authentication";
    case ErrorCode::kAuthorization: return "authorization";
    case ErrorCode::kConflict: return "conflict";
    case ErrorCode::kPolicy: return "policy";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kCorruption: return "corruption";
  }
  return "unknown";
}

namespace {

template <typename E, std::size_t N>
E lookup(std::string_view s, const std::array<std::pair<E, std::string_view>, N>& table,
         const char* what) {
  for (const auto& [v, name] : table) {
    if (name == s) return v;
  }
  throw Error(ErrorCode::kParse, std::string("unknown ") + what + " '" + std::string(s) + "'");
}

template <typename E, std::size_t N>
std::string_view name_of(E v, const std::array<std::pair<E, std::string_view>, N>& table) {
  for (const auto& [e, name] : table) {
    if (e == v) return name;
  }
  return "?";
}

constexpr std::array<std::pair<Theme, std::string_view>, 4> kThemeNames = {{
    {Theme::kTaxation, "taxation"},
    {Theme::kEcology, "ecology"},
    {Theme::kStateOrganization, "state_organization"},
    {Theme::kDemocracy, "democracy"},
}};

constexpr std::array<std::pair<SegmentType, std::string_view>, 3> kSegmentNames = {{
    {SegmentType::kStatement, "statement"},
    {SegmentType::kSolution, "solution"},
    {SegmentType::kPremise, "premise"},
}};

// Listed in reporting priority order.
constexpr std::array<std::pair<ErrorLabel, std::string_view>, 4> kErrorNames = {{
    {ErrorLabel::kOverAnalysis, "over_analysis"},
    {ErrorLabel::kMiscomprehension, "miscomprehension"},
    {ErrorLabel::kOverSpecificity, "over_specificity"},
    {ErrorLabel::kMisformulation, "misformulation"},
}};

constexpr std::array<std::pair<Phase, std::string_view>, 3> kPhaseNames = {{
    {Phase::kPhase1, "phase1"},
    {Phase::kPhase2, "phase2"},
    {Phase::kAutomatic, "automatic"},
}};

constexpr std::array<std::pair<RecordStatus, std::string_view>, 2> kStatusNames = {{
    {RecordStatus::kCompleted, "completed"},
    {RecordStatus::kSkipped, "skipped"},
}};

constexpr std::array<std::pair<SkipReason, std::string_view>, 4> kSkipNames = {{
    {SkipReason::kNotUnderstandable, "not_understandable"},
    {SkipReason::kHateSpeech, "hate_speech"},
    {SkipReason::kTooLong, "too_long"},
    {SkipReason::kPersonalInfo, "personal_info"},
}};

}  // namespace

std::string_view to_string(Theme v) { return name_of(v, kThemeNames); }
std::string_view to_string(SegmentType v) { return name_of(v, kSegmentNames); }
std::string_view to_string(ErrorLabel v) { return name_of(v, kErrorNames); }
std::string_view to_string(Phase v) { return name_of(v, kPhaseNames); }
std::string_view to_string(RecordStatus v) { return name_of(v, kStatusNames); }
std::string_view to_string(SkipReason v) { return name_of(v, kSkipNames); }

Theme parse_theme(std::string_view s) { return lookup(s, kThemeNames, "theme"); }
SegmentType parse_segment_type(std::string_view s) {
  return lookup(s, kSegmentNames, "segment type");
}
ErrorLabel parse_error_label(std::string_view s) {
  return lookup(s, kErrorNames, "error label");
}
Phase parse_phase(std::string_view s) { return lookup(s, kPhaseNames, "phase"); }
RecordStatus parse_record_status(std::string_view s) {
  return lookup(s, kStatusNames, "record status");
}
SkipReason parse_skip_reason(std::string_view s) {
  return lookup(s, kSkipNames, "skip reason");
}

std::string_view theme_title(Theme v, std::string_view language) {
  const bool fr = language == "fr";
  switch (v) {
    case Theme::kTaxation:
      return fr ? "La fiscalité et les dépenses publiques" : "Taxation and Public Spending";
    case Theme::kEcology:
      return fr ? "La transition écologique" : "Ecological Transition";
    case Theme::kStateOrganization:
      return fr ? "L'organisation de l'État et des services publics"
                : "Organization of the State";
    case Theme::kDemocracy:
      return fr ? "La démocratie et la citoyenneté" : "Democracy and Citizenship";
  }
  return "";
}

Contribution make_contribution(std::string id, Theme theme, std::string text,
                               std::size_t sentence_count) {
  Contribution c;
  c.id = std::move(id);
  c.theme = theme;
  c.char_length = utf8::length(text);
  c.text = std::move(text);
  c.sentence_count = sentence_count;
  return c;
}

std::optional<ErrorLabel> dominant_label(const std::set<ErrorLabel>& labels) {
  for (const auto& [label, name] : kErrorNames) {
    if (labels.count(label)) return label;
  }
  return std::nullopt;
}

std::string unit_text(const ArgumentativeUnit& unit, std::string_view source) {
  const auto u = utf8::decode(source);
  std::u32string out;
  for (const auto& span : unit.spans) {
    if (span.end > u.size() || span.start > span.end) {
      throw Error(ErrorCode::kInvalidArgument, "span out of bounds");
    }
    if (!out.empty()) out.push_back(U' ');
    out.append(u, span.start, span.size());
  }
  return utf8::encode(out);
}

}  // namespace clarify
