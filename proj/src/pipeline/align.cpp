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

#include "clarify/pipeline/align.hpp"

#include <algorithm>
#include <optional>

#include "clarify/core/utf8.hpp"
#include "clarify/metrics/strings.hpp"

namespace clarify::pipeline {
namespace {

struct Normalized {
  std::u32string text;   // whitespace collapsed, trimmed
  std::u32string lower;  // same length as text
  std::vector<std::size_t> origin;  // text index -> original scalar offset
};

Normalized normalize(std::string_view s) {
  const auto u = utf8::decode(s);
  Normalized n;
  bool pending_space = false;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (utf8::is_space(u[i])) {
      pending_space = !n.text.empty();
      continue;
    }
    if (pending_space) {
      n.text.push_back(U' ');
      n.origin.push_back(i - 1);
      pending_space = false;
    }
    n.text.push_back(u[i]);
    n.origin.push_back(i);
  }
  n.lower = utf8::to_lower(n.text);
  return n;
}

// Token boundaries of a normalized string: positions between a space and a
// non-space, around punctuation, and at both ends.
std::vector<bool> boundaries(const std::u32string& t) {
  std::vector<bool> b(t.size() + 1, false);
  b[0] = b[t.size()] = true;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const char32_t l = t[i - 1], r = t[i];
    b[i] = utf8::is_space(l) || utf8::is_space(r) || utf8::is_punct(l) || utf8::is_punct(r);
  }
  return b;
}

struct Token {
  std::size_t start, end;
};

std::vector<Token> tokens_of(const std::u32string& t) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < t.size()) {
    if (utf8::is_space(t[i])) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    if (!utf8::is_punct(t[i])) {
      while (j < t.size() && !utf8::is_space(t[j]) && !utf8::is_punct(t[j])) ++j;
    }
    out.push_back({i, j});
    i = j;
  }
  return out;
}

struct Piece {
  std::size_t src_start, src_end;  // normalized source
  bool verbatim;                   // exact case
  std::size_t covered;             // generated non-space chars matching in case
};

std::size_t non_space(std::u32string_view s) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char32_t c) { return !utf8::is_space(c); }));
}

bool all_punct(std::u32string_view s) {
  return std::all_of(s.begin(), s.end(), [](char32_t c) { return utf8::is_space(c) || utf8::is_punct(c); });
}

// Finds needle in hay at or after from, starting and ending on token boundaries.
std::optional<std::size_t> find_aligned(const std::u32string& hay, const std::vector<bool>& bounds,
                                        std::u32string_view needle, std::size_t from) {
  std::size_t pos = from;
  while ((pos = hay.find(needle, pos)) != std::u32string::npos) {
    if (bounds[pos] && bounds[pos + needle.size()]) return pos;
    ++pos;
  }
  return std::nullopt;
}

// Best window of src[lo, hi) on token boundaries for a drifted run.
std::optional<Piece> fuzzy_window(const Normalized& src, const std::vector<bool>& bounds,
                                  std::u32string_view run_lower, std::size_t lo, std::size_t hi) {
  const std::size_t max_len = run_lower.size() + run_lower.size() / 2 + 2;
  double best = -1.0;
  Piece out{};
  for (std::size_t a = lo; a < hi; ++a) {
    if (!bounds[a] || utf8::is_space(src.text[a])) continue;
    for (std::size_t b = a + 1; b <= hi && b - a <= max_len; ++b) {
      if (!bounds[b] || utf8::is_space(src.text[b - 1])) continue;
      const double sim = metrics::normalized_similarity(
          run_lower, std::u32string_view(src.lower).substr(a, b - a));
      if (sim > best) {
        best = sim;
        out = {a, b, false, 0};
      }
    }
  }
  if (best >= kFuzzyThreshold) return out;
  return std::nullopt;
}

}  // namespace

const char* to_string(AlignStatus s) {
  switch (s) {
    case AlignStatus::kExact:
      return "exact";
    case AlignStatus::kFuzzyFlagged:
      return "fuzzy";
    case AlignStatus::kFailed:
      return "failed";
  }
  return "";
}

AlignmentResult align_extractive(std::string_view source, std::string_view generated) {
  AlignmentResult result;
  const Normalized src = normalize(source);
  const Normalized gen = normalize(generated);
  const std::size_t total = non_space(gen.text);
  if (total == 0 || src.text.empty()) return result;

  const auto src_bounds = boundaries(src.text);
  const auto toks = tokens_of(gen.text);

  // Greedy pass: pieces in generated order; unmatched tokens become runs.
  struct Step {
    std::optional<Piece> piece;
    std::size_t tok_begin, tok_end;  // generated tokens covered
  };
  std::vector<Step> steps;
  std::size_t cursor = 0;
  std::size_t t = 0;
  while (t < toks.size()) {
    std::optional<Piece> found;
    std::size_t end_tok = t;
    for (std::size_t e = toks.size(); e > t; --e) {
      const std::size_t g0 = toks[t].start, g1 = toks[e - 1].end;
      auto needle = std::u32string_view(gen.lower).substr(g0, g1 - g0);
      if (auto pos = find_aligned(src.lower, src_bounds, needle, cursor)) {
        std::size_t same = 0;
        bool verbatim = true;
        for (std::size_t k = 0; k < needle.size(); ++k) {
          const char32_t g = gen.text[g0 + k];
          if (g != src.text[*pos + k]) {
            verbatim = false;
          } else if (!utf8::is_space(g)) {
            ++same;
          }
        }
        found = Piece{*pos, *pos + needle.size(), verbatim, same};
        end_tok = e;
        break;
      }
    }
    if (found) {
      cursor = found->src_end;
      steps.push_back({found, t, end_tok});
      t = end_tok;
    } else if (!steps.empty() && !steps.back().piece) {
      steps.back().tok_end = t + 1;
      ++t;
    } else {
      steps.push_back({std::nullopt, t, t + 1});
      ++t;
    }
  }

  // Resolve unmatched runs inside the source gap around them.
  bool drift = false;
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& s = steps[i];
    if (s.piece) {
      pieces.push_back(*s.piece);
      drift = drift || !s.piece->verbatim;
      continue;
    }
    const std::size_t g0 = toks[s.tok_begin].start, g1 = toks[s.tok_end - 1].end;
    const auto run = std::u32string_view(gen.lower).substr(g0, g1 - g0);
    drift = true;
    if (all_punct(run)) continue;
    const std::size_t lo = pieces.empty() ? 0 : pieces.back().src_end;
    std::size_t hi = src.text.size();
    if (i + 1 < steps.size() && steps[i + 1].piece) hi = steps[i + 1].piece->src_start;
    auto window = fuzzy_window(src, src_bounds, run, lo, hi);
    if (!window) return AlignmentResult{};
    pieces.push_back(*window);
  }
  if (pieces.empty()) return AlignmentResult{};

  // Merge pieces whose source gap holds only whitespace or punctuation.
  std::vector<std::pair<std::size_t, std::size_t>> merged;
  for (const auto& p : pieces) {
    if (!merged.empty()) {
      auto& last = merged.back();
      const auto gap = std::u32string_view(src.text).substr(last.second, p.src_start - last.second);
      if (p.src_start >= last.second && all_punct(gap)) {
        last.second = p.src_end;
        continue;
      }
    }
    merged.emplace_back(p.src_start, p.src_end);
  }
  std::size_t covered = 0;
  for (const auto& p : pieces) covered += p.covered;
  for (const auto& [a, b] : merged) result.spans.push_back({src.origin[a], src.origin[b - 1] + 1});
  result.coverage = static_cast<double>(covered) / static_cast<double>(total);
  result.status = drift ? AlignStatus::kFuzzyFlagged : AlignStatus::kExact;
  if (result.status == AlignStatus::kExact) result.coverage = 1.0;
  return result;
}

}  // namespace clarify::pipeline
