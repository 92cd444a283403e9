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
#include <map>
#include <string>
#include <vector>

#include "clarify/core/json_io.hpp"
#include "clarify/eval/clusters.hpp"
#include "clarify/eval/significance.hpp"
#include "clarify/llm/backend.hpp"
#include "clarify/llm/parse.hpp"

namespace clarify::eval {

// One comparison: a within-cluster pair from clustering A against one from B.
struct JudgeItem {
  Theme theme = Theme::kTaxation;
  std::vector<std::string> texts_a;
  std::vector<std::string> texts_b;
};

// Pairs the i-th sampled pair of A with the i-th of B per theme, truncating
// to the shorter list. Display texts follow surface_text_id, resolved in
// either assignment; an unresolvable id is Error(kNotFound).
std::vector<JudgeItem> build_judge_items(const ClusterAssignment& a, const PairSample& sample_a,
                                         const ClusterAssignment& b, const PairSample& sample_b);

struct JudgeOptions {
  std::string language = "fr";
  bool one_shot = false;
  std::uint64_t seed = 0;  // side randomization
  bool randomize_sides = true;
  std::size_t max_parallel = 1;
};

struct JudgeOutcome {
  bool swapped = false;  // B was shown in the A slot
  bool judged = false;   // false: backend failure, excluded from the tally
  bool flagged = false;  // unparseable twice, counted as a tie
  llm::Verdict verdict = llm::Verdict::kTie;  // in the caller's A/B terms
  std::string raw;
  std::string error;
};

using Counts = std::array<std::size_t, 3>;  // A, B, TIE

struct JudgeTally {
  std::map<Theme, Counts> per_theme;
  Counts total{};
  std::size_t flagged = 0;
  std::size_t unjudged = 0;
};

struct JudgeReport {
  std::vector<JudgeOutcome> outcomes;  // same order as the items
  JudgeTally tally;
};

// Renders the cluster-judge prompt with randomized sides, parses the verdict
// (one corrective retry) and maps it back to the caller's sides.
JudgeReport judge_pairs(const std::vector<JudgeItem>& items, llm::ChatBackend& backend,
                        const JudgeOptions& opts = {});

JudgeTally tally(const std::vector<JudgeItem>& items, const std::vector<JudgeOutcome>& outcomes);

Json to_json(const JudgeTally& t);
Json to_json(const JudgeOutcome& o);

struct ClusterEvaluation {
  PairSample sample_a;
  PairSample sample_b;
  std::vector<JudgeItem> items;
  JudgeReport report;
};

// Samples n pairs per theme from each clustering (seeds derived from
// opts.seed), pairs them up and judges them.
ClusterEvaluation evaluate_clusterings(const ClusterAssignment& a, const ClusterAssignment& b, std::size_t n_per_theme,
                                       llm::ChatBackend& judge, const JudgeOptions& opts);

// Tally plus significance tests per theme and in total.
Json evaluation_report(const JudgeReport& report, Alternative alt = Alternative::kTwoSided);

}  // namespace clarify::eval
