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

namespace clarify::utf8 {

// Decodes UTF-8 into Unicode scalar values. Invalid sequences throw
// Error(kInvalidArgument).
std::u32string decode(std::string_view text);
std::string encode(std::u32string_view text);
std::string encode(char32_t c);

// Number of Unicode scalar values in a UTF-8 string.
std::size_t length(std::string_view text);

// Substring by scalar-value offsets [start, end).
std::string substr(std::string_view text, std::size_t start, std::size_t end);

bool is_space(char32_t c);
bool is_punct(char32_t c);

// Simple case folding for Latin scripts (ASCII, Latin-1, Latin Extended-A).
char32_t to_lower(char32_t c);
std::u32string to_lower(std::u32string_view s);

// Trims leading and trailing whitespace.
std::string trim(std::string_view text);

}  // namespace clarify::utf8
