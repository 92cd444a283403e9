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

#include "clarify/core/json_io.hpp"

#include <fstream>
#include <sstream>

#include "clarify/core/error.hpp"
#include "clarify/core/utf8.hpp"

namespace clarify {
namespace fs = std::filesystem;

namespace {

template <typename T>
void put_optional(Json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <typename T>
std::optional<T> get_optional(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->template get<T>();
}

}  // namespace

void to_json(Json& j, const CharSpan& v) { j = Json::array({v.start, v.end}); }

void from_json(const Json& j, CharSpan& v) {
  if (!j.is_array() || j.size() != 2) {
    throw Error(ErrorCode::kParse, "span must be a [start, end] pair");
  }
  v.start = j[0].get<std::size_t>();
  v.end = j[1].get<std::size_t>();
}

void to_json(Json& j, const LabeledSegment& v) {
  j = Json{{"span", v.span}, {"kind", to_string(v.kind)}};
}

void from_json(const Json& j, LabeledSegment& v) {
  v.span = j.at("span").get<CharSpan>();
  v.kind = parse_segment_type(j.at("kind").get<std::string>());
}

void to_json(Json& j, const ArgumentativeUnit& v) {
  j = Json{{"spans", v.spans}, {"segments", v.segments}};
  put_optional(j, "clarification", v.clarification);
  put_optional(j, "source_model", v.source_model);
}

void from_json(const Json& j, ArgumentativeUnit& v) {
  v.spans = j.at("spans").get<std::vector<CharSpan>>();
  v.segments = j.value("segments", std::vector<LabeledSegment>{});
  v.clarification = get_optional<std::string>(j, "clarification");
  v.source_model = get_optional<std::string>(j, "source_model");
}

void to_json(Json& j, const ClarificationEvent& v) {
  j = Json{{"au_index", v.au_index},
           {"backend", v.backend},
           {"attempt", v.attempt},
           {"accepted", v.accepted}};
  put_optional(j, "observed_quality", v.observed_quality);
  if (!v.error_labels.empty()) {
    Json labels = Json::array();
    for (auto l : v.error_labels) labels.push_back(to_string(l));
    j["error_labels"] = labels;
  }
  put_optional(j, "generated", v.generated);
  put_optional(j, "final_text", v.final_text);
}

void from_json(const Json& j, ClarificationEvent& v) {
  v.au_index = j.at("au_index").get<std::size_t>();
  v.backend = j.at("backend").get<std::string>();
  v.attempt = j.at("attempt").get<std::size_t>();
  v.accepted = j.at("accepted").get<bool>();
  v.observed_quality = get_optional<double>(j, "observed_quality");
  v.error_labels.clear();
  if (auto it = j.find("error_labels"); it != j.end() && !it->is_null()) {
    for (const auto& l : *it) v.error_labels.insert(parse_error_label(l.get<std::string>()));
  }
  v.generated = get_optional<std::string>(j, "generated");
  v.final_text = get_optional<std::string>(j, "final_text");
}

void to_json(Json& j, const AnnotationRecord& v) {
  j = Json{{"contribution_id", v.contribution_id},
           {"annotator_id", v.annotator_id},
           {"phase", to_string(v.phase)},
           {"units", v.units},
           {"events", v.events},
           {"status", to_string(v.status)}};
  if (v.skip_reason) j["skip_reason"] = to_string(*v.skip_reason);
}

void from_json(const Json& j, AnnotationRecord& v) {
  v.contribution_id = j.at("contribution_id").get<std::string>();
  v.annotator_id = j.value("annotator_id", std::string{});
  v.phase = parse_phase(j.value("phase", std::string{"phase1"}));
  v.units = j.value("units", std::vector<ArgumentativeUnit>{});
  v.events = j.value("events", std::vector<ClarificationEvent>{});
  v.status = parse_record_status(j.value("status", std::string{"completed"}));
  v.skip_reason.reset();
  if (auto r = get_optional<std::string>(j, "skip_reason")) v.skip_reason = parse_skip_reason(*r);
}

void to_json(Json& j, const Contribution& v) {
  j = Json{{"id", v.id},
           {"theme", to_string(v.theme)},
           {"text", v.text},
           {"sentence_count", v.sentence_count},
           {"char_length", v.char_length}};
}

void from_json(const Json& j, Contribution& v) {
  v.id = j.at("id").get<std::string>();
  v.theme = parse_theme(j.at("theme").get<std::string>());
  v.text = j.at("text").get<std::string>();
  v.sentence_count = j.value("sentence_count", std::size_t{0});
  v.char_length = utf8::length(v.text);
}

void to_json(Json& j, const Violation& v) {
  j = Json{{"rule", v.rule}, {"element", v.element}, {"message", v.message}};
}

void for_each_json_line(std::istream& in, const std::string& name,
                        const std::function<void(const Json&, std::size_t)>& fn) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kParse, name + ":" + std::to_string(lineno) + ": " + e.what());
    }
    try {
      fn(j, lineno);
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kParse, name + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kParse) throw;
      throw Error(ErrorCode::kParse, name + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (in.bad()) throw Error(ErrorCode::kIo, name + ": read failure after line " + std::to_string(lineno));
}

void for_each_json_line(const fs::path& path,
                        const std::function<void(const Json&, std::size_t)>& fn) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  for_each_json_line(in, path.string(), fn);
}

std::vector<AnnotationRecord> read_records(const fs::path& path) {
  std::vector<AnnotationRecord> out;
  for_each_json_line(path, [&](const Json& j, std::size_t) { out.push_back(j.get<AnnotationRecord>()); });
  return out;
}

std::vector<Contribution> read_contributions(const fs::path& path) {
  std::vector<Contribution> out;
  for_each_json_line(path, [&](const Json& j, std::size_t) { out.push_back(j.get<Contribution>()); });
  return out;
}

void write_jsonl(std::ostream& out, const std::vector<Json>& rows) {
  for (const auto& r : rows) out << r.dump() << '\n';
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error(ErrorCode::kIo, "short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace clarify
