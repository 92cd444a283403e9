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

#include "clarify/metrics/segmentation.hpp"

#include <algorithm>
#include <limits>

#include "clarify/core/error.hpp"

namespace clarify::metrics {

double window_diff(const std::vector<std::size_t>& ref_boundaries,
                   const std::vector<std::size_t>& hyp_boundaries, std::size_t n_tokens,
                   std::size_t k) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "window_diff: k must be positive");
  if (k >= n_tokens) {
    throw Error(ErrorCode::kInvalidArgument, "window_diff: k must be smaller than n_tokens");
  }
  // prefix[i] = number of boundaries at positions < i
  const auto prefix = [n_tokens](const std::vector<std::size_t>& bounds) {
    std::vector<std::size_t> marks(n_tokens + 1, 0);
    for (auto b : bounds) {
      if (b == 0 || b >= n_tokens) {
        throw Error(ErrorCode::kInvalidArgument,
                    "window_diff: boundary " + std::to_string(b) + " outside [1, n_tokens-1]");
      }
      marks[b] = 1;
    }
    std::vector<std::size_t> p(n_tokens + 2, 0);
    for (std::size_t i = 0; i <= n_tokens; ++i) p[i + 1] = p[i] + marks[i];
    return p;
  };
  const auto pr = prefix(ref_boundaries);
  const auto ph = prefix(hyp_boundaries);
  const std::size_t windows = n_tokens - k;
  std::size_t disagreements = 0;
  for (std::size_t i = 0; i < windows; ++i) {
    // boundaries at positions i+1 .. i+k
    const auto r = pr[i + k + 1] - pr[i + 1];
    const auto h = ph[i + k + 1] - ph[i + 1];
    disagreements += (r != h);
  }
  return static_cast<double>(disagreements) / static_cast<double>(windows);
}

std::vector<std::size_t> unit_boundaries(const AnnotationRecord& record,
                                         const std::vector<Token>& tokens) {
  constexpr std::size_t kOutside = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> owner(tokens.size(), kOutside);
  for (std::size_t u = 0; u < record.units.size(); ++u) {
    for (auto t : tokens_in(tokens, record.units[u].spans)) owner[t] = u;
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    if (owner[i] != owner[i - 1]) out.push_back(i);
  }
  return out;
}

double overlap_score(const TokenSet& s1, const TokenSet& s2) {
  if (s1.empty() || s2.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "overlap_score: empty token set");
  }
  std::size_t inter = 0;
  for (std::size_t i = 0, j = 0; i < s1.size() && j < s2.size();) {
    if (s1[i] == s2[j]) {
      ++inter;
      ++i;
      ++j;
    } else if (s1[i] < s2[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  const double n = static_cast<double>(inter);
  return std::min(n / static_cast<double>(s1.size()), n / static_cast<double>(s2.size()));
}

double constrained_overlap(const LabeledSegment& seg1, const LabeledSegment& seg2,
                           const std::vector<Token>& tokens) {
  const auto t1 = tokens_in(tokens, {seg1.span});
  const auto t2 = tokens_in(tokens, {seg2.span});
  const double s = overlap_score(t1, t2);
  return seg1.kind == seg2.kind ? s : 0.0;
}

std::vector<std::optional<std::size_t>> max_assignment(const ScoreMatrix& scores) {
  const std::size_t rows = scores.rows();
  const std::size_t cols = scores.cols();
  const std::size_t n = std::max(rows, cols);
  std::vector<std::optional<std::size_t>> result(rows);
  if (n == 0) return result;
  const auto cost = [&](std::size_t r, std::size_t c) {
    return (r < rows && c < cols) ? -scores(r, c) : 0.0;
  };
  // Potentials-based Hungarian method on the padded n x n problem, 1-indexed.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  for (std::size_t j = 1; j <= n; ++j) {
    const std::size_t r = p[j] - 1;
    const std::size_t c = j - 1;
    if (r < rows && c < cols) result[r] = c;
  }
  return result;
}

MatchResult match_scores(const ScoreMatrix& scores, double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "lambda must lie in (0, 1]");
  }
  constexpr double kSlack = 1e-12;
  MatchResult out;
  const auto assignment = max_assignment(scores);
  std::vector<char> used_b(scores.cols(), 0);
  for (std::size_t r = 0; r < scores.rows(); ++r) {
    if (!assignment[r]) {
      out.unmatched_a.push_back(r);
      continue;
    }
    const std::size_t c = *assignment[r];
    const double s = scores(r, c);
    out.assignment_total += s;
    if (s + kSlack >= lambda) {
      out.pairs.emplace_back(r, c);
      out.scores.push_back(s);
      used_b[c] = 1;
    } else {
      out.unmatched_a.push_back(r);
    }
  }
  for (std::size_t c = 0; c < scores.cols(); ++c) {
    if (!used_b[c]) out.unmatched_b.push_back(c);
  }
  return out;
}

MatchResult match_spans(const std::vector<TokenSet>& side_a, const std::vector<TokenSet>& side_b,
                        const MatchConfig& cfg) {
  ScoreMatrix scores(side_a.size(), side_b.size());
  for (std::size_t i = 0; i < side_a.size(); ++i) {
    for (std::size_t j = 0; j < side_b.size(); ++j) {
      scores(i, j) = (side_a[i].empty() || side_b[j].empty())
                         ? 0.0
                         : overlap_score(side_a[i], side_b[j]);
    }
  }
  return match_scores(scores, cfg.lambda);
}

namespace {

double harmonic(double p, double r) { return (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

double ratio_or(std::size_t num, std::size_t den, bool both_empty) {
  if (den > 0) return static_cast<double>(num) / static_cast<double>(den);
  return both_empty ? 1.0 : 0.0;
}

}  // namespace

SpanPrf span_prf(const std::vector<DocumentCounts>& documents) {
  SpanPrf out;
  if (documents.empty()) return out;
  std::size_t m = 0, na = 0, nb = 0;
  double mp = 0.0, mr = 0.0, mf = 0.0;
  for (const auto& d : documents) {
    m += d.matches;
    na += d.n_a;
    nb += d.n_b;
    const bool empty = d.n_a == 0 && d.n_b == 0;
    const double p = ratio_or(d.matches, d.n_a, empty);
    const double r = ratio_or(d.matches, d.n_b, empty);
    mp += p;
    mr += r;
    mf += empty ? 1.0 : harmonic(p, r);
  }
  const bool all_empty = na == 0 && nb == 0;
  out.micro.precision = ratio_or(m, na, all_empty);
  out.micro.recall = ratio_or(m, nb, all_empty);
  out.micro.f1 = all_empty ? 1.0 : harmonic(out.micro.precision, out.micro.recall);
  const double n = static_cast<double>(documents.size());
  out.macro = {mp / n, mr / n, mf / n};
  return out;
}

}  // namespace clarify::metrics
