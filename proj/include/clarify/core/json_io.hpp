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

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "clarify/core/types.hpp"
#include "clarify/core/validate.hpp"

namespace clarify {

using Json = nlohmann::json;

// Canonical JSON mapping. Field names are snake_case, spans are [start, end].
void to_json(Json& j, const CharSpan& v);
void from_json(const Json& j, CharSpan& v);
void to_json(Json& j, const LabeledSegment& v);
void from_json(const Json& j, LabeledSegment& v);
void to_json(Json& j, const ArgumentativeUnit& v);
void from_json(const Json& j, ArgumentativeUnit& v);
void to_json(Json& j, const ClarificationEvent& v);
void from_json(const Json& j, ClarificationEvent& v);
void to_json(Json& j, const AnnotationRecord& v);
void from_json(const Json& j, AnnotationRecord& v);
void to_json(Json& j, const Contribution& v);
void from_json(const Json& j, Contribution& v);
void to_json(Json& j, const Violation& v);

// Reads a JSON-lines file; blank lines are skipped. Parse failures throw
// Error(kParse) naming the file and 1-based line number.
void for_each_json_line(const std::filesystem::path& path,
                        const std::function<void(const Json&, std::size_t)>& fn);
void for_each_json_line(std::istream& in, const std::string& name,
                        const std::function<void(const Json&, std::size_t)>& fn);

std::vector<AnnotationRecord> read_records(const std::filesystem::path& path);
std::vector<Contribution> read_contributions(const std::filesystem::path& path);

// One compact JSON document per line, '\n' terminated.
void write_jsonl(std::ostream& out, const std::vector<Json>& rows);

template <typename T>
void write_jsonl(std::ostream& out, const std::vector<T>& items) {
  for (const auto& item : items) out << Json(item).dump() << '\n';
}

// Writes through a temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

}  // namespace clarify
