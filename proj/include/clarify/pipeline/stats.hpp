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
#include <string>
#include <vector>

#include "clarify/core/json_io.hpp"
#include "clarify/core/types.hpp"

namespace clarify::pipeline {

struct StatsRow {
  std::string label;  // theme name or "total"
  std::size_t contributions = 0;
  std::size_t units = 0;
  std::size_t statements = 0;
  std::size_t solutions = 0;
  std::size_t premises = 0;
  // Shares of the three segment types within the row, in percent.
  double pct_statements = 0.0;
  double pct_solutions = 0.0;
  double pct_premises = 0.0;
};

struct CorpusStats {
  std::vector<StatsRow> themes;  // one row per theme, fixed order
  StatsRow total;
};

// One record per contribution: the completed record with the smallest
// annotator id. Skipped records are ignored. Throws Error(kInvalidArgument)
// for a record whose contribution is unknown.
CorpusStats corpus_stats(const std::vector<AnnotationRecord>& records,
                         const std::vector<Contribution>& contributions);

Json to_json(const CorpusStats& s);
// Fixed-width text table, percentages with one decimal.
std::string format_table(const CorpusStats& s);

struct PairScores {
  double levenshtein = 0.0;
  double rouge1 = 0.0;  // F1
  double rouge2 = 0.0;
  double rouge_l = 0.0;
};

// Means over accepted clarification events that carry both texts.
struct ClarificationGroup {
  std::string backend;            // backend name, "mean" or "pooled"
  std::size_t modified = 0;       // final differs from the backend output
  std::size_t unmodified = 0;
  PairScores au_llm;              // modified rows
  PairScores au_final;
  PairScores llm_final;
  PairScores au_llm_unmodified;   // AU -> LLM = Final
  std::size_t contained = 0;      // modified finals contained in the LLM output
  double containment = 0.0;
  double au_length_modified = 0.0;    // characters
  double au_length_unmodified = 0.0;
  double llm_length = 0.0;
  double final_length_modified = 0.0;
};

struct ClarificationDiagnostics {
  std::vector<ClarificationGroup> backends;  // sorted by name
  ClarificationGroup mean;    // unweighted mean of the per-backend values
  ClarificationGroup pooled;  // all rows together
};

// True if `inner` occurs in `outer` once punctuation is removed and
// whitespace collapsed. Case-sensitive.
bool contained_ignoring_punctuation(std::string_view inner, std::string_view outer);

ClarificationDiagnostics clarification_diagnostics(const std::vector<AnnotationRecord>& records,
                                                   const std::vector<Contribution>& contributions);

Json to_json(const ClarificationDiagnostics& d);

}  // namespace clarify::pipeline
