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

#include "clarify/pipeline/stats.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "clarify/core/error.hpp"
#include "clarify/core/utf8.hpp"
#include "clarify/metrics/strings.hpp"

namespace clarify::pipeline {
namespace {

void set_percentages(StatsRow& r) {
  const double n = static_cast<double>(r.statements + r.solutions + r.premises);
  if (n == 0) return;
  r.pct_statements = 100.0 * static_cast<double>(r.statements) / n;
  r.pct_solutions = 100.0 * static_cast<double>(r.solutions) / n;
  r.pct_premises = 100.0 * static_cast<double>(r.premises) / n;
}

void add_row(StatsRow& into, const StatsRow& r) {
  into.contributions += r.contributions;
  into.units += r.units;
  into.statements += r.statements;
  into.solutions += r.solutions;
  into.premises += r.premises;
}

Json row_json(const StatsRow& r) {
  return Json{{"label", r.label},
              {"contributions", r.contributions},
              {"units", r.units},
              {"statements", r.statements},
              {"solutions", r.solutions},
              {"premises", r.premises},
              {"pct_statements", r.pct_statements},
              {"pct_solutions", r.pct_solutions},
              {"pct_premises", r.pct_premises}};
}

std::map<std::string, const Contribution*> index_contributions(const std::vector<Contribution>& cs) {
  std::map<std::string, const Contribution*> out;
  for (const auto& c : cs) out[c.id] = &c;
  return out;
}

const Contribution& lookup(const std::map<std::string, const Contribution*>& index, const std::string& id) {
  auto it = index.find(id);
  if (it == index.end()) throw Error(ErrorCode::kInvalidArgument, "record for unknown contribution '" + id + "'");
  return *it->second;
}

}  // namespace

CorpusStats corpus_stats(const std::vector<AnnotationRecord>& records,
                         const std::vector<Contribution>& contributions) {
  const auto index = index_contributions(contributions);
  std::map<std::string, const AnnotationRecord*> chosen;
  for (const auto& r : records) {
    if (r.status != RecordStatus::kCompleted) continue;
    lookup(index, r.contribution_id);
    auto& slot = chosen[r.contribution_id];
    if (!slot || r.annotator_id < slot->annotator_id) slot = &r;
  }

  CorpusStats stats;
  std::map<Theme, StatsRow> rows;
  for (Theme t : kAllThemes) rows[t].label = std::string(to_string(t));
  for (const auto& [id, r] : chosen) {
    auto& row = rows[lookup(index, id).theme];
    ++row.contributions;
    row.units += r->units.size();
    for (const auto& u : r->units) {
      for (const auto& s : u.segments) {
        switch (s.kind) {
          case SegmentType::kStatement:
            ++row.statements;
            break;
          case SegmentType::kSolution:
            ++row.solutions;
            break;
          case SegmentType::kPremise:
            ++row.premises;
            break;
        }
      }
    }
  }
  stats.total.label = "total";
  for (Theme t : kAllThemes) {
    auto row = rows[t];
    set_percentages(row);
    add_row(stats.total, row);
    stats.themes.push_back(row);
  }
  set_percentages(stats.total);
  return stats;
}

Json to_json(const CorpusStats& s) {
  Json themes = Json::array();
  for (const auto& r : s.themes) themes.push_back(row_json(r));
  return Json{{"themes", themes}, {"total", row_json(s.total)}};
}

std::string format_table(const CorpusStats& s) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-20s %8s %8s %16s %16s %16s\n", "theme", "contrib", "units", "statements",
                "solutions", "premises");
  out << line;
  auto emit = [&](const StatsRow& r) {
    auto cell = [](std::size_t n, double pct) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%zu (%.1f%%)", n, pct);
      return std::string(buf);
    };
    std::snprintf(line, sizeof line, "%-20s %8zu %8zu %16s %16s %16s\n", r.label.c_str(), r.contributions, r.units,
                  cell(r.statements, r.pct_statements).c_str(), cell(r.solutions, r.pct_solutions).c_str(),
                  cell(r.premises, r.pct_premises).c_str());
    out << line;
  };
  for (const auto& r : s.themes) emit(r);
  emit(s.total);
  return out.str();
}

bool contained_ignoring_punctuation(std::string_view inner, std::string_view outer) {
  auto strip = [](std::string_view s) {
    std::u32string out;
    bool space = false;
    for (char32_t c : utf8::decode(s)) {
      if (utf8::is_punct(c)) continue;
      if (utf8::is_space(c)) {
        space = !out.empty();
        continue;
      }
      if (space) out.push_back(U' ');
      space = false;
      out.push_back(c);
    }
    return out;
  };
  const auto a = strip(inner), b = strip(outer);
  return b.find(a) != std::u32string::npos;
}

namespace {

struct Row {
  std::string au, llm, final_text;
};

PairScores score(const std::string& ref, const std::string& hyp) {
  using metrics::RougeVariant;
  return {static_cast<double>(metrics::levenshtein(ref, hyp)), metrics::rouge(ref, hyp, RougeVariant::kRouge1).f1,
          metrics::rouge(ref, hyp, RougeVariant::kRouge2).f1, metrics::rouge(ref, hyp, RougeVariant::kRougeL).f1};
}

void accumulate(PairScores& into, const PairScores& s) {
  into.levenshtein += s.levenshtein;
  into.rouge1 += s.rouge1;
  into.rouge2 += s.rouge2;
  into.rouge_l += s.rouge_l;
}

void scale(PairScores& s, double k) {
  s.levenshtein *= k;
  s.rouge1 *= k;
  s.rouge2 *= k;
  s.rouge_l *= k;
}

double len(const std::string& s) { return static_cast<double>(utf8::length(s)); }

ClarificationGroup summarize(const std::string& name, const std::vector<Row>& rows) {
  ClarificationGroup g;
  g.backend = name;
  double llm_len = 0;
  for (const auto& r : rows) {
    llm_len += len(r.llm);
    if (r.llm == r.final_text) {
      ++g.unmodified;
      accumulate(g.au_llm_unmodified, score(r.au, r.llm));
      g.au_length_unmodified += len(r.au);
      continue;
    }
    ++g.modified;
    accumulate(g.au_llm, score(r.au, r.llm));
    accumulate(g.au_final, score(r.au, r.final_text));
    accumulate(g.llm_final, score(r.llm, r.final_text));
    if (contained_ignoring_punctuation(r.final_text, r.llm)) ++g.contained;
    g.au_length_modified += len(r.au);
    g.final_length_modified += len(r.final_text);
  }
  if (g.modified) {
    const double k = 1.0 / static_cast<double>(g.modified);
    scale(g.au_llm, k);
    scale(g.au_final, k);
    scale(g.llm_final, k);
    g.containment = static_cast<double>(g.contained) * k;
    g.au_length_modified *= k;
    g.final_length_modified *= k;
  }
  if (g.unmodified) {
    const double k = 1.0 / static_cast<double>(g.unmodified);
    scale(g.au_llm_unmodified, k);
    g.au_length_unmodified *= k;
  }
  if (!rows.empty()) g.llm_length = llm_len / static_cast<double>(rows.size());
  return g;
}

ClarificationGroup mean_of(const std::vector<ClarificationGroup>& groups) {
  ClarificationGroup m;
  m.backend = "mean";
  if (groups.empty()) return m;
  for (const auto& g : groups) {
    m.modified += g.modified;
    m.unmodified += g.unmodified;
    m.contained += g.contained;
    accumulate(m.au_llm, g.au_llm);
    accumulate(m.au_final, g.au_final);
    accumulate(m.llm_final, g.llm_final);
    accumulate(m.au_llm_unmodified, g.au_llm_unmodified);
    m.containment += g.containment;
    m.au_length_modified += g.au_length_modified;
    m.au_length_unmodified += g.au_length_unmodified;
    m.llm_length += g.llm_length;
    m.final_length_modified += g.final_length_modified;
  }
  const double k = 1.0 / static_cast<double>(groups.size());
  scale(m.au_llm, k);
  scale(m.au_final, k);
  scale(m.llm_final, k);
  scale(m.au_llm_unmodified, k);
  m.containment *= k;
  m.au_length_modified *= k;
  m.au_length_unmodified *= k;
  m.llm_length *= k;
  m.final_length_modified *= k;
  return m;
}

Json pair_json(const PairScores& p) {
  return Json{{"levenshtein", p.levenshtein}, {"rouge1", p.rouge1}, {"rouge2", p.rouge2}, {"rouge_l", p.rouge_l}};
}

Json group_json(const ClarificationGroup& g) {
  return Json{{"backend", g.backend},
              {"modified", g.modified},
              {"unmodified", g.unmodified},
              {"au_llm", pair_json(g.au_llm)},
              {"au_final", pair_json(g.au_final)},
              {"llm_final", pair_json(g.llm_final)},
              {"au_llm_unmodified", pair_json(g.au_llm_unmodified)},
              {"contained", g.contained},
              {"containment", g.containment},
              {"au_length_modified", g.au_length_modified},
              {"au_length_unmodified", g.au_length_unmodified},
              {"llm_length", g.llm_length},
              {"final_length_modified", g.final_length_modified}};
}

}  // namespace

ClarificationDiagnostics clarification_diagnostics(const std::vector<AnnotationRecord>& records,
                                                   const std::vector<Contribution>& contributions) {
  const auto index = index_contributions(contributions);
  std::map<std::string, std::vector<Row>> by_backend;
  std::vector<Row> all;
  for (const auto& r : records) {
    if (r.status != RecordStatus::kCompleted || r.events.empty()) continue;
    const auto& c = lookup(index, r.contribution_id);
    for (const auto& ev : r.events) {
      if (!ev.accepted || !ev.generated || !ev.final_text || ev.au_index >= r.units.size()) continue;
      Row row{unit_text(r.units[ev.au_index], c.text), *ev.generated, *ev.final_text};
      by_backend[ev.backend].push_back(row);
      all.push_back(std::move(row));
    }
  }
  ClarificationDiagnostics d;
  for (const auto& [name, rows] : by_backend) d.backends.push_back(summarize(name, rows));
  d.mean = mean_of(d.backends);
  d.pooled = summarize("pooled", all);
  return d;
}

Json to_json(const ClarificationDiagnostics& d) {
  Json backends = Json::array();
  for (const auto& g : d.backends) backends.push_back(group_json(g));
  return Json{{"backends", backends}, {"mean", group_json(d.mean)}, {"pooled", group_json(d.pooled)}};
}

}  // namespace clarify::pipeline
