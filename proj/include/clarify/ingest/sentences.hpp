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
#include <vector>

#include "clarify/core/types.hpp"

namespace clarify::ingest {

// Rule-based French sentence splitter. A boundary is a maximal run of
// . ! ? or … followed (after optional closing quotes or brackets) by
// whitespace or the end of the text. A lone period after a known
// abbreviation or a single-letter initial is not a boundary.
std::vector<CharSpan> split_sentences(std::string_view text);

std::size_t count_sentences(std::string_view text);

}  // namespace clarify::ingest
