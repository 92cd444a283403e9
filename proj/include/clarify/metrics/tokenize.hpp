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
#include <string_view>
#include <vector>

#include "clarify/core/types.hpp"

namespace clarify::metrics {

struct Token {
  std::string text;
  CharSpan span;  // scalar offsets in the source

  bool operator==(const Token&) const = default;
};

// Whitespace split with every punctuation character as its own token. The
// same token unit drives WindowDiff, overlap scores and ROUGE.
std::vector<Token> tokenize(std::string_view text);

// Sorted token indices.
using TokenSet = std::vector<std::size_t>;

// Indices of tokens whose character span lies fully inside the union of spans.
TokenSet tokens_in(const std::vector<Token>& tokens, const std::vector<CharSpan>& spans);

}  // namespace clarify::metrics
