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
#include <optional>
#include <utility>
#include <vector>

#include "clarify/core/types.hpp"
#include "clarify/metrics/tokenize.hpp"

namespace clarify::metrics {

// WindowDiff over boundary positions. A boundary at index i sits between
// tokens i-1 and i. Returns the fraction of the n_tokens - k windows in which
// the two boundary counts differ.
double window_diff(const std::vector<std::size_t>& ref_boundaries,
                   const std::vector<std::size_t>& hyp_boundaries, std::size_t n_tokens,
                   std::size_t k);

// Boundaries induced by a record's units: token i starts a new region when its
// unit (or "outside every unit") differs from token i-1's.
std::vector<std::size_t> unit_boundaries(const AnnotationRecord& record,
                                         const std::vector<Token>& tokens);

// min(|S1 ∩ S2| / |S1|, |S1 ∩ S2| / |S2|). Throws on an empty set.
double overlap_score(const TokenSet& s1, const TokenSet& s2);

// δ(label1, label2) · overlap_score over the segments' tokens.
double constrained_overlap(const LabeledSegment& seg1, const LabeledSegment& seg2,
                           const std::vector<Token>& tokens);

struct MatchConfig {
  double lambda = 0.5;
  std::size_t window_k = 15;
};

// Dense row-major score matrix.
class ScoreMatrix {
 public:
  ScoreMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), v_(rows * cols) {}
  double& operator()(std::size_t r, std::size_t c) { return v_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return v_[r * cols_ + c]; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> v_;
};

// Exact maximum-weight one-to-one assignment (Hungarian method). Rectangular
// input is padded with zero-score dummies; result[r] is the column assigned
// to row r or nullopt when the row got a dummy.
std::vector<std::optional<std::size_t>> max_assignment(const ScoreMatrix& scores);

struct MatchResult {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // kept (a, b) pairs
  std::vector<double> scores;                              // score of each kept pair
  std::vector<std::size_t> unmatched_a;
  std::vector<std::size_t> unmatched_b;
  double assignment_total = 0.0;  // optimum before thresholding
};

// Solves the assignment and keeps pairs with score >= lambda.
MatchResult match_scores(const ScoreMatrix& scores, double lambda);

MatchResult match_spans(const std::vector<TokenSet>& side_a, const std::vector<TokenSet>& side_b,
                        const MatchConfig& cfg);

struct DocumentCounts {
  std::size_t matches = 0;
  std::size_t n_a = 0;  // predicted / second annotator
  std::size_t n_b = 0;  // reference / first annotator
};

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct SpanPrf {
  Prf micro;
  Prf macro;
};

SpanPrf span_prf(const std::vector<DocumentCounts>& documents);

}  // namespace clarify::metrics
