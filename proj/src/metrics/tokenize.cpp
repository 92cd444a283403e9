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

#include "clarify/metrics/tokenize.hpp"

#include <algorithm>

#include "clarify/core/utf8.hpp"

namespace clarify::metrics {

std::vector<Token> tokenize(std::string_view text) {
  const auto u = utf8::decode(text);
  std::vector<Token> out;
  std::size_t i = 0;
  const auto emit = [&](std::size_t b, std::size_t e) {
    out.push_back({utf8::encode(std::u32string_view(u).substr(b, e - b)), {b, e}});
  };
  while (i < u.size()) {
    if (utf8::is_space(u[i])) {
      ++i;
    } else if (utf8::is_punct(u[i])) {
      emit(i, i + 1);
      ++i;
    } else {
      std::size_t j = i;
      while (j < u.size() && !utf8::is_space(u[j]) && !utf8::is_punct(u[j])) ++j;
      emit(i, j);
      i = j;
    }
  }
  return out;
}

TokenSet tokens_in(const std::vector<Token>& tokens, const std::vector<CharSpan>& spans) {
  std::vector<CharSpan> hull(spans);
  std::sort(hull.begin(), hull.end());
  std::vector<CharSpan> merged;
  for (const auto& s : hull) {
    if (!merged.empty() && s.start <= merged.back().end) {
      merged.back().end = std::max(merged.back().end, s.end);
    } else {
      merged.push_back(s);
    }
  }
  TokenSet out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i].span;
    if (std::any_of(merged.begin(), merged.end(), [&](const CharSpan& m) { return m.contains(t); })) {
      out.push_back(i);
    }
  }
  return out;
}

}  // namespace clarify::metrics
