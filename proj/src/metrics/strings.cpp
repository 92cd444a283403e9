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

#include "clarify/metrics/strings.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "clarify/core/utf8.hpp"
#include "clarify/metrics/tokenize.hpp"

namespace clarify::metrics {

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] != b[j - 1]);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  return levenshtein(utf8::decode(a), utf8::decode(b));
}

double normalized_similarity(std::u32string_view a, std::u32string_view b) {
  const auto longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

namespace {

std::vector<std::string> words(std::string_view text) {
  std::vector<std::string> out;
  for (auto& t : tokenize(text)) out.push_back(std::move(t.text));
  return out;
}

std::map<std::vector<std::string>, std::size_t> ngrams(const std::vector<std::string>& w,
                                                       std::size_t n) {
  std::map<std::vector<std::string>, std::size_t> out;
  for (std::size_t i = 0; i + n <= w.size(); ++i) {
    ++out[std::vector<std::string>(w.begin() + i, w.begin() + i + n)];
  }
  return out;
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

RougeScore from_counts(std::size_t overlap, std::size_t hyp_total, std::size_t ref_total) {
  RougeScore s;
  if (hyp_total == 0 || ref_total == 0) return s;
  s.precision = static_cast<double>(overlap) / static_cast<double>(hyp_total);
  s.recall = static_cast<double>(overlap) / static_cast<double>(ref_total);
  if (s.precision + s.recall > 0.0) {
    s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  }
  return s;
}

}  // namespace

RougeScore rouge(std::string_view ref, std::string_view hyp, RougeVariant variant) {
  const auto r = words(ref);
  const auto h = words(hyp);
  if (r.empty() || h.empty()) return {};
  if (variant == RougeVariant::kRougeL) return from_counts(lcs_length(r, h), h.size(), r.size());
  const std::size_t n = variant == RougeVariant::kRouge1 ? 1 : 2;
  const auto rg = ngrams(r, n);
  const auto hg = ngrams(h, n);
  std::size_t overlap = 0, hyp_total = 0, ref_total = 0;
  for (const auto& [g, c] : hg) {
    hyp_total += c;
    if (auto it = rg.find(g); it != rg.end()) overlap += std::min(c, it->second);
  }
  for (const auto& [g, c] : rg) ref_total += c;
  return from_counts(overlap, hyp_total, ref_total);
}

}  // namespace clarify::metrics
