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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "clarify/core/types.hpp"
#include "clarify/metrics/segmentation.hpp"
#include "clarify/metrics/tokenize.hpp"

namespace clarify::metrics {

// Token classes for tagging agreement; kNone exists only here.
enum class TokenClass { kStatement = 0, kSolution = 1, kPremise = 2, kNone = 3 };
inline constexpr std::size_t kTokenClasses = 4;

using Confusion = std::array<std::array<double, kTokenClasses>, kTokenClasses>;

// Per-class agreement is intersection over union of the token sets each
// annotator labels with the class; nullopt when neither uses the class.
inline constexpr const char* kPerClassDefinition =
    "per_class = |tokens labeled c by both| / |tokens labeled c by either|";

struct TagAgreement {
  std::size_t n_tokens = 0;
  double ratio = 0.0;
  std::array<std::optional<double>, 3> per_class;  // statement, solution, premise
  double merged_ratio = 0.0;                       // premise folded into statement
  Confusion confusion{};                           // proportions, rows = a, cols = b
  Confusion counts{};                              // raw token counts
};

std::vector<TokenClass> token_labels(const AnnotationRecord& record,
                                     const std::vector<Token>& tokens);

TagAgreement tag_agreement(const AnnotationRecord& a, const AnnotationRecord& b,
                           const Contribution& contribution);

// One doubly-annotated contribution.
struct AnnotationPair {
  const AnnotationRecord* a = nullptr;  // second annotator / prediction
  const AnnotationRecord* b = nullptr;  // first annotator / reference
  const Contribution* contribution = nullptr;
};

// Per-document AU match counts at one lambda.
DocumentCounts unit_match_counts(const AnnotationRecord& a, const AnnotationRecord& b,
                                 const std::vector<Token>& tokens, double lambda);

struct AgreementReport {
  std::size_t documents = 0;
  double window_diff_mean = 0.0;
  double window_diff_median = 0.0;
  std::map<double, SpanPrf> span_prf;  // keyed by lambda
  double tag_ratio_mean = 0.0;
  double tag_ratio_median = 0.0;
  double merged_ratio_mean = 0.0;
  std::array<std::optional<double>, 3> per_class;  // pooled over documents
  Confusion confusion{};                           // pooled proportions
};

AgreementReport agreement_report(const std::vector<AnnotationPair>& pairs,
                                 const std::vector<double>& lambdas, std::size_t window_k);

nlohmann::json to_json(const AgreementReport& report);

// Pairs records of two annotation sets by contribution id.
std::vector<AnnotationPair> pair_by_contribution(
    const std::vector<AnnotationRecord>& side_a, const std::vector<AnnotationRecord>& side_b,
    const std::map<std::string, Contribution>& contributions);

// Pairs the first two distinct annotators' completed records per contribution.
std::vector<AnnotationPair> pair_double_annotations(
    const std::vector<AnnotationRecord>& records,
    const std::map<std::string, Contribution>& contributions);

}  // namespace clarify::metrics
