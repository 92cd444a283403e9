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

#include "clarify/eval/judge.hpp"

#include <atomic>
#include <thread>
#include <unordered_map>

#include "clarify/core/error.hpp"
#include "clarify/core/rng.hpp"
#include "clarify/llm/prompts.hpp"

namespace clarify::eval {
namespace {

std::string bullet_list(const std::vector<std::string>& texts) {
  std::string out;
  for (const auto& t : texts) {
    if (!out.empty()) out += '\n';
    out += "- " + t;
  }
  return out;
}

std::string corrective_message(const std::string& language) {
  if (language == "en") return "Answer only with \"A\", \"B\" or \"TIE\".";
  return "Réponds uniquement par « A », « B » ou « ÉGALITÉ ».";
}

llm::Verdict unswap(llm::Verdict v, bool swapped) {
  if (!swapped || v == llm::Verdict::kTie) return v;
  return v == llm::Verdict::kA ? llm::Verdict::kB : llm::Verdict::kA;
}

std::size_t slot(llm::Verdict v) {
  switch (v) {
    case llm::Verdict::kA:
      return 0;
    case llm::Verdict::kB:
      return 1;
    case llm::Verdict::kTie:
      return 2;
  }
  return 2;
}

JudgeOutcome judge_one(const JudgeItem& item, bool swapped, llm::ChatBackend& backend, const JudgeOptions& opts) {
  namespace ph = llm::placeholder;
  JudgeOutcome out;
  out.swapped = swapped;
  const auto& first = swapped ? item.texts_b : item.texts_a;
  const auto& second = swapped ? item.texts_a : item.texts_b;
  llm::RenderOptions ro{opts.language, llm::kDefaultVariant, opts.one_shot};
  auto messages = llm::render_prompt(llm::Stage::kClusterJudge,
                                     {{ph::kClusterA, bullet_list(first)}, {ph::kClusterB, bullet_list(second)}}, ro);
  try {
    for (int attempt = 0; attempt < 2; ++attempt) {
      out.raw = backend.complete(messages).text;
      try {
        out.verdict = unswap(llm::parse_verdict(out.raw), swapped);
        out.judged = true;
        return out;
      } catch (const llm::StageParseError&) {
        messages.push_back({"assistant", out.raw});
        messages.push_back({"user", corrective_message(opts.language)});
      }
    }
    out.judged = true;
    out.flagged = true;
    out.verdict = llm::Verdict::kTie;
  } catch (const Error& e) {
    out.judged = false;
    out.error = e.what();
  }
  return out;
}

}  // namespace

std::vector<JudgeItem> build_judge_items(const ClusterAssignment& a, const PairSample& sample_a,
                                         const ClusterAssignment& b, const PairSample& sample_b) {
  std::unordered_map<std::string, const ClusterItem*> index_a, index_b;
  for (const auto& i : a.items) index_a[i.text_id] = &i;
  for (const auto& i : b.items) index_b[i.text_id] = &i;
  auto display = [&](const std::unordered_map<std::string, const ClusterItem*>& own,
                     const std::unordered_map<std::string, const ClusterItem*>& other, const std::string& id) {
    const ClusterItem* item = own.at(id);
    if (!item->surface_text_id) return item->text;
    for (const auto* idx : {&own, &other}) {
      if (auto it = idx->find(*item->surface_text_id); it != idx->end()) return it->second->text;
    }
    throw Error(ErrorCode::kNotFound, "surface_text_id " + *item->surface_text_id + " of " + id + " not found");
  };
  std::vector<JudgeItem> items;
  for (Theme theme : kAllThemes) {
    const auto ia = sample_a.pairs.find(theme);
    const auto ib = sample_b.pairs.find(theme);
    if (ia == sample_a.pairs.end() || ib == sample_b.pairs.end()) continue;
    const std::size_t n = std::min(ia->second.size(), ib->second.size());
    for (std::size_t i = 0; i < n; ++i) {
      const auto& pa = ia->second[i];
      const auto& pb = ib->second[i];
      items.push_back({theme,
                       {display(index_a, index_b, pa.first), display(index_a, index_b, pa.second)},
                       {display(index_b, index_a, pb.first), display(index_b, index_a, pb.second)}});
    }
  }
  return items;
}

JudgeReport judge_pairs(const std::vector<JudgeItem>& items, llm::ChatBackend& backend, const JudgeOptions& opts) {
  // Sides are drawn up front so the permutation does not depend on scheduling.
  std::vector<bool> swapped(items.size());
  Rng rng(derive_seed(opts.seed, "judge-sides"));
  for (std::size_t i = 0; i < items.size(); ++i) swapped[i] = opts.randomize_sides && rng.uniform_index(2) == 1;

  JudgeReport report;
  report.outcomes.resize(items.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < items.size();) {
      report.outcomes[i] = judge_one(items[i], swapped[i], backend, opts);
    }
  };
  const std::size_t n_threads = std::max<std::size_t>(1, std::min(opts.max_parallel, items.size()));
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  report.tally = tally(items, report.outcomes);
  return report;
}

JudgeTally tally(const std::vector<JudgeItem>& items, const std::vector<JudgeOutcome>& outcomes) {
  if (items.size() != outcomes.size()) throw Error(ErrorCode::kInvalidArgument, "items and outcomes differ in length");
  JudgeTally t;
  for (Theme theme : kAllThemes) t.per_theme[theme] = Counts{};
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& o = outcomes[i];
    if (!o.judged) {
      ++t.unjudged;
      continue;
    }
    if (o.flagged) ++t.flagged;
    ++t.per_theme[items[i].theme][slot(o.verdict)];
    ++t.total[slot(o.verdict)];
  }
  return t;
}

namespace {

Json counts_json(const Counts& c) { return Json{{"a", c[0]}, {"b", c[1]}, {"tie", c[2]}}; }

}  // namespace

Json to_json(const JudgeTally& t) {
  Json themes = Json::object();
  for (const auto& [theme, c] : t.per_theme) themes[std::string(to_string(theme))] = counts_json(c);
  return Json{{"themes", themes}, {"total", counts_json(t.total)}, {"flagged", t.flagged}, {"unjudged", t.unjudged}};
}

Json to_json(const JudgeOutcome& o) {
  Json j{{"swapped", o.swapped}, {"judged", o.judged}, {"flagged", o.flagged}, {"raw", o.raw}};
  j["verdict"] = o.judged ? Json(llm::to_string(o.verdict)) : Json(nullptr);
  if (!o.error.empty()) j["error"] = o.error;
  return j;
}

ClusterEvaluation evaluate_clusterings(const ClusterAssignment& a, const ClusterAssignment& b, std::size_t n_per_theme,
                                       llm::ChatBackend& judge, const JudgeOptions& opts) {
  ClusterEvaluation out;
  out.sample_a = sample_pairs(a, n_per_theme, derive_seed(opts.seed, "clustering_a"));
  out.sample_b = sample_pairs(b, n_per_theme, derive_seed(opts.seed, "clustering_b"));
  out.items = build_judge_items(a, out.sample_a, b, out.sample_b);
  out.report = judge_pairs(out.items, judge, opts);
  return out;
}

Json evaluation_report(const JudgeReport& report, Alternative alt) {
  auto tests = [&](const Counts& c) -> Json {
    if (c[0] + c[1] + c[2] == 0) return nullptr;
    return to_json(significance_tests(c, alt));
  };
  Json per_theme = Json::object();
  for (const auto& [theme, c] : report.tally.per_theme) per_theme[std::string(to_string(theme))] = tests(c);
  return Json{{"tally", to_json(report.tally)},
              {"tests", {{"themes", per_theme}, {"total", tests(report.tally.total)}}}};
}

}  // namespace clarify::eval
