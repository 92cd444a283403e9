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

#include "clarify/ingest/sentences.hpp"

#include <array>
#include <string>

#include "clarify/core/utf8.hpp"

namespace clarify::ingest {
namespace {

constexpr std::array<std::u32string_view, 26> kAbbreviations = {
    U"mm",  U"mme", U"mmes", U"mlle", U"mlles", U"dr",   U"pr",  U"st",  U"ste",
    U"cf",  U"ex",  U"art",  U"av",   U"bd",    U"env",  U"vol", U"chap", U"fig",
    U"pp",  U"nb",  U"no",   U"vs",   U"resp",  U"approx", U"éd", U"réf"};

bool is_terminal(char32_t c) { return c == U'.' || c == U'!' || c == U'?' || c == U'…'; }

bool is_closer(char32_t c) {
  return c == U'»' || c == U'"' || c == U'\'' || c == U')' || c == U']' || c == U'’' ||
         c == U'”';
}

bool is_abbreviation(const std::u32string& text, std::size_t dot) {
  std::size_t start = dot;
  while (start > 0 && !utf8::is_space(text[start - 1]) && !utf8::is_punct(text[start - 1])) {
    --start;
  }
  if (start == dot) return false;
  auto word = utf8::to_lower(std::u32string_view(text).substr(start, dot - start));
  if (word.size() == 1) return !(word[0] >= U'0' && word[0] <= U'9');
  for (auto a : kAbbreviations) {
    if (word == a) return true;
  }
  return false;
}

void push_trimmed(const std::u32string& text, std::size_t start, std::size_t end,
                  std::vector<CharSpan>& out) {
  while (start < end && utf8::is_space(text[start])) ++start;
  while (end > start && utf8::is_space(text[end - 1])) --end;
  if (start < end) out.push_back({start, end});
}

}  // namespace

std::vector<CharSpan> split_sentences(std::string_view text) {
  const auto u = utf8::decode(text);
  std::vector<CharSpan> out;
  std::size_t begin = 0;
  std::size_t i = 0;
  while (i < u.size()) {
    if (!is_terminal(u[i])) {
      ++i;
      continue;
    }
    std::size_t run_end = i;
    while (run_end < u.size() && is_terminal(u[run_end])) ++run_end;
    std::size_t end = run_end;
    while (end < u.size() && is_closer(u[end])) ++end;
    const bool at_break = end == u.size() || utf8::is_space(u[end]);
    const bool lone_period = run_end - i == 1 && u[i] == U'.';
    if (at_break && !(lone_period && is_abbreviation(u, i))) {
      push_trimmed(u, begin, end, out);
      begin = end;
    }
    i = end;
  }
  push_trimmed(u, begin, u.size(), out);
  return out;
}

std::size_t count_sentences(std::string_view text) { return split_sentences(text).size(); }

}  // namespace clarify::ingest
