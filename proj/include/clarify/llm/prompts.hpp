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

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace clarify::llm {

enum class Stage { kAuExtraction, kAsDetection, kClarification, kClarifJudge, kClusterJudge };

const char* to_string(Stage s);
Stage parse_stage(std::string_view s);

// Placeholder names as they appear between double braces.
namespace placeholder {
inline constexpr const char* kContribution = "contribution";
inline constexpr const char* kTheme = "theme";
inline constexpr const char* kUnit = "argumentative unit";
inline constexpr const char* kStatements = "statements";
inline constexpr const char* kPremises = "premises";
inline constexpr const char* kSolutions = "solutions";
inline constexpr const char* kClarificationA = "clarification_a";
inline constexpr const char* kClarificationB = "clarification_b";
inline constexpr const char* kClusterA = "cluster_a";
inline constexpr const char* kClusterB = "cluster_b";
}  // namespace placeholder

// Clarification has two variants: "pipeline" (segment + contribution) and
// "annotation" (typed segments + theme, used by the annotation service).
inline constexpr const char* kDefaultVariant = "default";
inline constexpr const char* kPipelineVariant = "pipeline";
inline constexpr const char* kAnnotationVariant = "annotation";

struct Message {
  std::string role;  // system, user or assistant
  std::string content;

  bool operator==(const Message&) const = default;
};

using Messages = std::vector<Message>;
using Vars = std::map<std::string, std::string>;

struct OneShotExample {
  Vars vars;
  std::string answer;
};

struct PromptTemplate {
  Stage stage = Stage::kAuExtraction;
  std::string language;  // "fr" or "en"
  std::string variant = kDefaultVariant;
  std::string system;
  std::string user;  // may reference placeholders
  std::optional<OneShotExample> example;
};

// Placeholders the stage (and variant) requires.
std::set<std::string> required_placeholders(Stage stage, std::string_view variant);

// Names referenced as {{name}} in text, in order of first appearance.
std::vector<std::string> placeholders_in(std::string_view text);

// Throws Error(kInvalidArgument) unless the template references exactly the
// placeholders its stage requires.
void check_template(const PromptTemplate& t);

// Single-pass substitution: substituted values are never rescanned. Throws
// Error(kInvalidArgument, "missing placeholder <name>") for an unbound name.
std::string substitute(std::string_view text, const Vars& vars);

struct RenderOptions {
  std::string language = "fr";
  std::string variant = kDefaultVariant;
  bool one_shot = false;
};

class PromptLibrary {
 public:
  // French and English templates for every stage.
  static const PromptLibrary& builtin();

  void add(PromptTemplate t);
  const PromptTemplate& find(Stage stage, std::string_view language, std::string_view variant) const;
  const std::vector<PromptTemplate>& templates() const { return templates_; }

  // System message, then the example exchange in one-shot mode, then the
  // user message.
  Messages render(Stage stage, const Vars& vars, const RenderOptions& opts = {}) const;

 private:
  std::vector<PromptTemplate> templates_;
};

Messages render_prompt(Stage stage, const Vars& vars, const RenderOptions& opts = {});

nlohmann::json to_json(const Messages& m);
Messages messages_from_json(const nlohmann::json& j);

}  // namespace clarify::llm
