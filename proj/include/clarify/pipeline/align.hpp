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

#include <string>
#include <string_view>
#include <vector>

#include "clarify/core/types.hpp"

namespace clarify::pipeline {

enum class AlignStatus { kExact, kFuzzyFlagged, kFailed };

const char* to_string(AlignStatus s);

struct AlignmentResult {
  std::vector<CharSpan> spans;  // source offsets, sorted and disjoint
  double coverage = 0.0;        // share of generated characters matched verbatim
  AlignStatus status = AlignStatus::kFailed;
};

// Minimum normalized similarity for a drifted run to be accepted.
inline constexpr double kFuzzyThreshold = 0.9;

// Locates an "extractive" model output in its source. Whitespace runs are
// collapsed on both sides. The output is consumed left to right by the
// longest token-aligned piece found at or after the previous match; pieces
// separated in the source only by whitespace or punctuation are merged.
// Unmatched punctuation is tolerated as drift, unmatched words must match a
// window of the source gap with similarity >= kFuzzyThreshold, and anything
// else fails.
AlignmentResult align_extractive(std::string_view source, std::string_view generated);

}  // namespace clarify::pipeline
