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

#include "clarify/llm/prompts.hpp"

#include <algorithm>

#include "clarify/core/error.hpp"
#include "clarify/llm/prompt_texts.hpp"

namespace clarify::llm {
namespace {

std::string_view trim_view(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::string_view effective_variant(Stage stage, std::string_view variant) {
  if (stage == Stage::kClarification && variant == kDefaultVariant) return kPipelineVariant;
  return variant;
}

}  // namespace

const char* to_string(Stage s) {
  switch (s) {
    case Stage::kAuExtraction:
      return "au_extraction";
    case Stage::kAsDetection:
      return "as_detection";
    case Stage::kClarification:
      return "clarification";
    case Stage::kClarifJudge:
      return "clarification_judge";
    case Stage::kClusterJudge:
      return "cluster_judge";
  }
  return "";
}

Stage parse_stage(std::string_view s) {
  for (Stage st : {Stage::kAuExtraction, Stage::kAsDetection, Stage::kClarification,
                   Stage::kClarifJudge, Stage::kClusterJudge}) {
    if (s == to_string(st)) return st;
  }
  throw Error(ErrorCode::kParse, "unknown stage: " + std::string(s));
}

std::set<std::string> required_placeholders(Stage stage, std::string_view variant) {
  namespace ph = placeholder;
  switch (stage) {
    case Stage::kAuExtraction:
      return {ph::kContribution};
    case Stage::kAsDetection:
      return {ph::kContribution, ph::kUnit};
    case Stage::kClarification:
      if (effective_variant(stage, variant) == kAnnotationVariant) {
        return {ph::kContribution, ph::kTheme, ph::kStatements, ph::kPremises, ph::kSolutions};
      }
      return {ph::kContribution, ph::kUnit};
    case Stage::kClarifJudge:
      return {ph::kContribution, ph::kUnit, ph::kClarificationA, ph::kClarificationB};
    case Stage::kClusterJudge:
      return {ph::kClusterA, ph::kClusterB};
  }
  return {};
}

std::vector<std::string> placeholders_in(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while ((pos = text.find("{{", pos)) != std::string_view::npos) {
    auto close = text.find("}}", pos + 2);
    if (close == std::string_view::npos) break;
    std::string name(trim_view(text.substr(pos + 2, close - pos - 2)));
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
    pos = close + 2;
  }
  return out;
}

void check_template(const PromptTemplate& t) {
  auto names = placeholders_in(t.system);
  for (auto& n : placeholders_in(t.user)) names.push_back(n);
  const std::set<std::string> have(names.begin(), names.end());
  const auto want = required_placeholders(t.stage, t.variant);
  const std::string where =
      std::string(to_string(t.stage)) + "/" + t.language + "/" + t.variant + ": ";
  for (const auto& w : want) {
    if (!have.count(w)) throw Error(ErrorCode::kInvalidArgument, where + "template lacks placeholder " + w);
  }
  for (const auto& h : have) {
    if (!want.count(h)) throw Error(ErrorCode::kInvalidArgument, where + "unexpected placeholder " + h);
  }
  if (t.example) {
    for (const auto& w : want) {
      if (!t.example->vars.count(w)) {
        throw Error(ErrorCode::kInvalidArgument, where + "example lacks placeholder " + w);
      }
    }
  }
}

std::string substitute(std::string_view text, const Vars& vars) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  for (;;) {
    auto open = text.find("{{", pos);
    auto close = open == std::string_view::npos ? open : text.find("}}", open + 2);
    if (close == std::string_view::npos) {
      out.append(text.substr(pos));
      return out;
    }
    out.append(text.substr(pos, open - pos));
    std::string name(trim_view(text.substr(open + 2, close - open - 2)));
    auto it = vars.find(name);
    if (it == vars.end()) throw Error(ErrorCode::kInvalidArgument, "missing placeholder " + name);
    out.append(it->second);
    pos = close + 2;
  }
}

const PromptLibrary& PromptLibrary::builtin() {
  static const PromptLibrary lib = [] {
    PromptLibrary l;
    for (auto& t : builtin_prompt_templates()) l.add(std::move(t));
    return l;
  }();
  return lib;
}

void PromptLibrary::add(PromptTemplate t) {
  check_template(t);
  for (auto& existing : templates_) {
    if (existing.stage == t.stage && existing.language == t.language && existing.variant == t.variant) {
      existing = std::move(t);
      return;
    }
  }
  templates_.push_back(std::move(t));
}

const PromptTemplate& PromptLibrary::find(Stage stage, std::string_view language,
                                          std::string_view variant) const {
  const auto v = effective_variant(stage, variant);
  for (const auto& t : templates_) {
    if (t.stage == stage && t.language == language && t.variant == v) return t;
  }
  throw Error(ErrorCode::kNotFound, "no template for " + std::string(to_string(stage)) + "/" +
                                        std::string(language) + "/" + std::string(v));
}

Messages PromptLibrary::render(Stage stage, const Vars& vars, const RenderOptions& opts) const {
  const auto& t = find(stage, opts.language, opts.variant);
  for (const auto& name : required_placeholders(stage, t.variant)) {
    if (!vars.count(name)) throw Error(ErrorCode::kInvalidArgument, "missing placeholder " + name);
  }
  Messages out;
  out.push_back({"system", substitute(t.system, vars)});
  if (opts.one_shot && t.example) {
    out.push_back({"user", substitute(t.user, t.example->vars)});
    out.push_back({"assistant", t.example->answer});
  }
  out.push_back({"user", substitute(t.user, vars)});
  return out;
}

Messages render_prompt(Stage stage, const Vars& vars, const RenderOptions& opts) {
  return PromptLibrary::builtin().render(stage, vars, opts);
}

nlohmann::json to_json(const Messages& m) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& msg : m) out.push_back({{"role", msg.role}, {"content", msg.content}});
  return out;
}

Messages messages_from_json(const nlohmann::json& j) {
  Messages out;
  try {
    for (const auto& m : j) out.push_back({m.at("role").get<std::string>(), m.at("content").get<std::string>()});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("messages: ") + e.what());
  }
  return out;
}

}  // namespace clarify::llm
