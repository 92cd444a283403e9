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

#include "clarify/llm/parse.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <sstream>

#include "clarify/core/utf8.hpp"

namespace clarify::llm {
namespace {

const char* kBuiltinTable = R"({
  "segment_tags": {
    "STATEMENT": "statement", "CONSTAT": "statement", "CONSTATS": "statement",
    "PREMISE": "premise", "PRÉMISSE": "premise", "PREMISSE": "premise",
    "ARGUMENT": "premise", "JUSTIFICATION": "premise",
    "SOLUTION": "solution", "PROPOSITION": "solution"
  },
  "verdicts": {
    "A": "a", "B": "b",
    "TIE": "tie", "EQUALITY": "tie", "ÉGALITÉ": "tie", "EGALITE": "tie", "EGALITÉ": "tie"
  }
})";

std::string fold(std::string_view s) {
  return utf8::encode(utf8::to_lower(utf8::decode(utf8::trim(s))));
}

std::vector<std::string> lines_of(const std::string& raw) {
  std::vector<std::string> out;
  std::istringstream in(raw);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

std::string excerpt(const std::string& raw) {
  constexpr std::size_t kMax = 200;
  return raw.size() <= kMax ? raw : raw.substr(0, kMax) + "...";
}

// Preambles, matched at the start of the trimmed output. Case-insensitive
// for ASCII letters.
const std::vector<std::regex>& preamble_patterns() {
  static const std::vector<std::regex> patterns = [] {
    const auto flags = std::regex::ECMAScript | std::regex::icase;
    return std::vector<std::regex>{
        std::regex(R"(^(voici|here is|here's)[^\n:]{0,160}:\s*)", flags),
        std::regex(
            R"(^(l(?:'|’)argument|l(?:'|’)unit|le segment|la clarification|la reformulation|le texte|)"
            R"(the argument|the clarif|the rewritten|the segment|clarification|clarified|)"
            R"(reformulation|r[ée]ponse|answer|argument clair|segment clarifi)[^\n:]{0,160}:\s*)",
            flags),
        // Any short colon-terminated first line.
        std::regex(R"(^[^\n]{0,160}:[ \t]*\n\s*)", flags),
    };
  }();
  return patterns;
}

struct Wrapper {
  std::string_view open;
  std::string_view close;
};

constexpr Wrapper kWrappers[] = {{"**", "**"}, {"__", "__"}, {"*", "*"},   {"_", "_"},
                                 {"`", "`"},   {"\"", "\""}, {"«", "»"},   {"“", "”"}};

bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }
bool ends_with(std::string_view s, std::string_view p) {
  return s.size() >= p.size() && s.substr(s.size() - p.size()) == p;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kA:
      return "A";
    case Verdict::kB:
      return "B";
    case Verdict::kTie:
      return "TIE";
  }
  return "";
}

const TagTable& TagTable::builtin() {
  static const TagTable table = from_json(nlohmann::json::parse(kBuiltinTable));
  return table;
}

TagTable TagTable::from_json(const nlohmann::json& j) {
  TagTable t;
  try {
    for (const auto& [k, v] : j.at("segment_tags").items()) {
      t.tags_[fold(k)] = parse_segment_type(v.get<std::string>());
    }
    for (const auto& [k, v] : j.at("verdicts").items()) {
      const auto s = v.get<std::string>();
      Verdict verdict;
      if (s == "a") {
        verdict = Verdict::kA;
      } else if (s == "b") {
        verdict = Verdict::kB;
      } else if (s == "tie") {
        verdict = Verdict::kTie;
      } else {
        throw Error(ErrorCode::kParse, "unknown verdict value " + s);
      }
      t.verdicts_[fold(k)] = verdict;
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("tag table: ") + e.what());
  }
  return t;
}

std::optional<SegmentType> TagTable::segment_type(std::string_view tag) const {
  auto it = tags_.find(fold(tag));
  if (it == tags_.end()) return std::nullopt;
  return it->second;
}

std::optional<Verdict> TagTable::verdict(std::string_view word) const {
  auto it = verdicts_.find(fold(word));
  if (it == verdicts_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> parse_unit_list(const std::string& raw) {
  std::vector<std::string> out;
  for (const auto& line : lines_of(raw)) {
    auto t = utf8::trim(line);
    if (t.empty() || t[0] != '-') continue;
    auto item = utf8::trim(std::string_view(t).substr(1));
    if (!item.empty()) out.push_back(std::move(item));
  }
  if (out.empty()) throw StageParseError("no list item in model output: " + excerpt(raw), raw);
  return out;
}

std::vector<TypedSegment> parse_typed_segments(const std::string& raw, const TagTable& tags) {
  static const std::regex line_re(R"(^-\s*\[\s*([^\]]+?)\s*\]\s*:?\s*(.*)$)");
  std::vector<TypedSegment> out;
  for (const auto& line : lines_of(raw)) {
    auto t = utf8::trim(line);
    std::smatch m;
    if (!std::regex_match(t, m, line_re)) continue;
    auto type = tags.segment_type(m[1].str());
    auto text = utf8::trim(m[2].str());
    if (!type || text.empty()) continue;
    out.push_back({*type, std::move(text)});
  }
  if (out.empty()) throw StageParseError("no typed segment in model output: " + excerpt(raw), raw);
  return out;
}

ParsedClarification parse_clarification(const std::string& raw) {
  ParsedClarification out;
  std::string text = utf8::trim(raw);
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& re : preamble_patterns()) {
      std::smatch m;
      if (std::regex_search(text, m, re) && m.length(0) < static_cast<long>(text.size())) {
        out.stripped.push_back(utf8::trim(m.str(0)));
        text = utf8::trim(text.substr(m.length(0)));
        changed = true;
        break;
      }
    }
    if (changed) continue;
    for (const auto& w : kWrappers) {
      const std::string_view v(text);
      if (v.size() > w.open.size() + w.close.size() && starts_with(v, w.open) && ends_with(v, w.close)) {
        auto inner = v.substr(w.open.size(), v.size() - w.open.size() - w.close.size());
        // Only a wrapper if the marker does not reappear inside.
        if (inner.find(w.open) != std::string_view::npos || inner.find(w.close) != std::string_view::npos) {
          continue;
        }
        out.stripped.push_back(std::string(w.open) + "..." + std::string(w.close));
        text = utf8::trim(inner);
        changed = true;
        break;
      }
    }
  }
  const auto chars = utf8::decode(text);
  const bool has_content = std::any_of(chars.begin(), chars.end(), [](char32_t c) {
    return !utf8::is_space(c) && !utf8::is_punct(c);
  });
  if (!has_content) throw StageParseError("empty clarification", raw);
  out.text = std::move(text);
  out.misformulation = !out.stripped.empty();
  return out;
}

Verdict parse_verdict(const std::string& raw, const TagTable& tags) {
  std::string text = utf8::trim(raw);
  // Drop a leading "Answer:" / "Verdict :" label.
  if (auto colon = text.find(':'); colon != std::string::npos && colon < 40) {
    auto label = fold(text.substr(0, colon));
    if (label == "answer" || label == "verdict" || label == "réponse" || label == "reponse") {
      text = utf8::trim(text.substr(colon + 1));
    }
  }
  // First word made of letters (UTF-8 accented letters included).
  std::string word;
  for (std::size_t i = 0; i < text.size();) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    const bool ascii_letter = std::isalpha(c) != 0;
    const bool latin1 = c == 0xC3 && i + 1 < text.size();
    if (ascii_letter || latin1) {
      word.append(text, i, latin1 ? 2 : 1);
      i += latin1 ? 2 : 1;
    } else if (!word.empty()) {
      break;
    } else {
      ++i;
    }
  }
  if (auto v = tags.verdict(word)) return *v;
  throw StageParseError("unparseable verdict: " + excerpt(raw), raw);
}

}  // namespace clarify::llm
