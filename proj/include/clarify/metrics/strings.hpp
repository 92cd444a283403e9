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
#include <string_view>

namespace clarify::metrics {

// Character-level (Unicode scalar) edit distance.
std::size_t levenshtein(std::string_view a, std::string_view b);
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);

// 1 - distance / max(len); 1 for two empty strings.
double normalized_similarity(std::u32string_view a, std::u32string_view b);

enum class RougeVariant { kRouge1, kRouge2, kRougeL };

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Token-level ROUGE over tokenize() output; all zeros when either side is empty.
RougeScore rouge(std::string_view ref, std::string_view hyp, RougeVariant variant);

}  // namespace clarify::metrics
