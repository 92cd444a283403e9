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

#include "clarify/metrics/agreement.hpp"

#include <algorithm>

#include "clarify/core/error.hpp"

namespace clarify::metrics {
namespace {

TokenClass to_class(SegmentType t) { return static_cast<TokenClass>(static_cast<int>(t)); }

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::array<std::optional<double>, 3> per_class_iou(const Confusion& counts) {
  std::array<std::optional<double>, 3> out;
  for (std::size_t c = 0; c < 3; ++c) {
    double row = 0.0, col = 0.0;
    for (std::size_t k = 0; k < kTokenClasses; ++k) {
      row += counts[c][k];
      col += counts[k][c];
    }
    const double both = counts[c][c];
    const double either = row + col - both;
    if (either > 0.0) out[c] = both / either;
  }
  return out;
}

Confusion proportions(const Confusion& counts) {
  double total = 0.0;
  for (const auto& row : counts) {
    for (double x : row) total += x;
  }
  Confusion p{};
  if (total == 0.0) return p;
  for (std::size_t i = 0; i < kTokenClasses; ++i) {
    for (std::size_t j = 0; j < kTokenClasses; ++j) p[i][j] = counts[i][j] / total;
  }
  return p;
}

std::vector<TokenSet> unit_token_sets(const AnnotationRecord& r, const std::vector<Token>& tokens) {
  std::vector<TokenSet> out;
  for (const auto& u : r.units) out.push_back(tokens_in(tokens, u.spans));
  return out;
}

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json prf_json(const Prf& p) {
  return {{"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1}};
}

}  // namespace

std::vector<TokenClass> token_labels(const AnnotationRecord& record,
                                     const std::vector<Token>& tokens) {
  std::vector<TokenClass> labels(tokens.size(), TokenClass::kNone);
  for (const auto& unit : record.units) {
    for (const auto& seg : unit.segments) {
      for (auto t : tokens_in(tokens, {seg.span})) labels[t] = to_class(seg.kind);
    }
  }
  return labels;
}

TagAgreement tag_agreement(const AnnotationRecord& a, const AnnotationRecord& b,
                           const Contribution& contribution) {
  if (a.contribution_id != contribution.id || b.contribution_id != contribution.id) {
    throw Error(ErrorCode::kInvalidArgument,
                "tag_agreement: records do not reference contribution '" + contribution.id + "'");
  }
  const auto tokens = tokenize(contribution.text);
  if (tokens.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "tag_agreement: contribution has no tokens");
  }
  const auto la = token_labels(a, tokens);
  const auto lb = token_labels(b, tokens);
  TagAgreement out;
  out.n_tokens = tokens.size();
  std::size_t equal = 0, merged_equal = 0;
  const auto merge = [](TokenClass c) {
    return c == TokenClass::kPremise ? TokenClass::kStatement : c;
  };
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    out.counts[static_cast<int>(la[i])][static_cast<int>(lb[i])] += 1.0;
    equal += la[i] == lb[i];
    merged_equal += merge(la[i]) == merge(lb[i]);
  }
  const double n = static_cast<double>(tokens.size());
  out.ratio = static_cast<double>(equal) / n;
  out.merged_ratio = static_cast<double>(merged_equal) / n;
  out.confusion = proportions(out.counts);
  out.per_class = per_class_iou(out.counts);
  return out;
}

DocumentCounts unit_match_counts(const AnnotationRecord& a, const AnnotationRecord& b,
                                 const std::vector<Token>& tokens, double lambda) {
  const auto sa = unit_token_sets(a, tokens);
  const auto sb = unit_token_sets(b, tokens);
  DocumentCounts d;
  d.n_a = sa.size();
  d.n_b = sb.size();
  d.matches = match_spans(sa, sb, {lambda, 15}).pairs.size();
  return d;
}

AgreementReport agreement_report(const std::vector<AnnotationPair>& pairs,
                                 const std::vector<double>& lambdas, std::size_t window_k) {
  AgreementReport out;
  out.documents = pairs.size();
  std::vector<double> wd, ratios, merged;
  std::map<double, std::vector<DocumentCounts>> counts;
  Confusion pooled{};
  for (const auto& p : pairs) {
    const auto tokens = tokenize(p.contribution->text);
    if (tokens.size() >= 2) {
      const std::size_t k = std::min(window_k, tokens.size() - 1);
      wd.push_back(window_diff(unit_boundaries(*p.b, tokens), unit_boundaries(*p.a, tokens),
                               tokens.size(), k));
    }
    for (double lambda : lambdas) {
      counts[lambda].push_back(unit_match_counts(*p.a, *p.b, tokens, lambda));
    }
    if (!tokens.empty()) {
      const auto tag = tag_agreement(*p.a, *p.b, *p.contribution);
      ratios.push_back(tag.ratio);
      merged.push_back(tag.merged_ratio);
      for (std::size_t i = 0; i < kTokenClasses; ++i) {
        for (std::size_t j = 0; j < kTokenClasses; ++j) pooled[i][j] += tag.counts[i][j];
      }
    }
  }
  out.window_diff_mean = mean(wd);
  out.window_diff_median = median(wd);
  for (double lambda : lambdas) out.span_prf[lambda] = span_prf(counts[lambda]);
  out.tag_ratio_mean = mean(ratios);
  out.tag_ratio_median = median(ratios);
  out.merged_ratio_mean = mean(merged);
  out.per_class = per_class_iou(pooled);
  out.confusion = proportions(pooled);
  return out;
}

nlohmann::json to_json(const AgreementReport& r) {
  nlohmann::json j;
  j["definitions"] = {
      {"per_class_agreement", kPerClassDefinition},
      {"macro", "mean over documents of per-document precision, recall and F1"},
      {"micro", "matches and unit counts pooled over documents"},
      {"confusion", "token proportions, rows = annotator a, columns = annotator b, "
                    "order statement, solution, premise, none"},
  };
  j["documents"] = r.documents;
  j["window_diff"] = {{"mean", r.window_diff_mean}, {"median", r.window_diff_median}};
  nlohmann::json spans = nlohmann::json::array();
  for (const auto& [lambda, prf] : r.span_prf) {
    spans.push_back({{"lambda", lambda}, {"micro", prf_json(prf.micro)}, {"macro", prf_json(prf.macro)}});
  }
  j["span_prf"] = spans;
  j["tag_agreement"] = {
      {"ratio_mean", r.tag_ratio_mean},
      {"ratio_median", r.tag_ratio_median},
      {"merged_statement_premise_mean", r.merged_ratio_mean},
      {"per_class",
       {{"statement", optional_json(r.per_class[0])},
        {"solution", optional_json(r.per_class[1])},
        {"premise", optional_json(r.per_class[2])}}},
      {"confusion", r.confusion},
  };
  return j;
}

std::vector<AnnotationPair> pair_by_contribution(
    const std::vector<AnnotationRecord>& side_a, const std::vector<AnnotationRecord>& side_b,
    const std::map<std::string, Contribution>& contributions) {
  std::map<std::string, const AnnotationRecord*> b_by_id;
  for (const auto& r : side_b) {
    if (r.status != RecordStatus::kCompleted) continue;
    auto& slot = b_by_id[r.contribution_id];
    if (!slot || r.annotator_id < slot->annotator_id) slot = &r;
  }
  std::map<std::string, AnnotationPair> out;
  for (const auto& r : side_a) {
    if (r.status != RecordStatus::kCompleted) continue;
    auto b = b_by_id.find(r.contribution_id);
    auto c = contributions.find(r.contribution_id);
    if (b == b_by_id.end() || c == contributions.end()) continue;
    auto [it, inserted] = out.try_emplace(r.contribution_id, AnnotationPair{&r, b->second, &c->second});
    if (!inserted && r.annotator_id < it->second.a->annotator_id) it->second.a = &r;
  }
  std::vector<AnnotationPair> v;
  for (auto& [id, p] : out) v.push_back(p);
  return v;
}

std::vector<AnnotationPair> pair_double_annotations(
    const std::vector<AnnotationRecord>& records,
    const std::map<std::string, Contribution>& contributions) {
  std::map<std::string, std::vector<const AnnotationRecord*>> by_id;
  for (const auto& r : records) {
    if (r.status == RecordStatus::kCompleted) by_id[r.contribution_id].push_back(&r);
  }
  std::vector<AnnotationPair> out;
  for (auto& [id, rs] : by_id) {
    auto c = contributions.find(id);
    if (c == contributions.end()) continue;
    std::sort(rs.begin(), rs.end(),
              [](auto* x, auto* y) { return x->annotator_id < y->annotator_id; });
    for (std::size_t i = 1; i < rs.size(); ++i) {
      if (rs[i]->annotator_id != rs[0]->annotator_id) {
        out.push_back({rs[i], rs[0], &c->second});
        break;
      }
    }
  }
  return out;
}

}  // namespace clarify::metrics
