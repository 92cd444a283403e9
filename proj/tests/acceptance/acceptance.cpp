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

// Acceptance suite. Prints one PASS/FAIL/SKIP line per criterion and exits
// non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "../oracles/oracles.hpp"
#include "../oracles/quality_oracles.hpp"
#include "../support/pipeline_fixture.hpp"
#include "../support/service_fixture.hpp"
#include "clarify/core/rng.hpp"
#include "clarify/eval/significance.hpp"
#include "clarify/metrics/agreement.hpp"
#include "clarify/metrics/segmentation.hpp"
#include "clarify/metrics/strings.hpp"
#include "clarify/pipeline/runner.hpp"
#include "clarify/pipeline/stats.hpp"
#include "clarify/quality/incomplete_beta.hpp"
#include "clarify/quality/model.hpp"

using namespace clarify;
namespace fs = std::filesystem;

namespace {

enum class Verdict { kPass, kFail, kSkip };

struct Outcome {
  Verdict verdict = Verdict::kPass;
  std::string detail;
};

// Collects failed checks; the first few are reported.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    ++total_;
    if (ok) return;
    if (failures_.size() < 3) failures_.push_back(what);
    ++failed_;
  }
  Outcome outcome(const std::string& summary) const {
    if (failed_ == 0) return {Verdict::kPass, summary};
    std::string d = std::to_string(failed_) + "/" + std::to_string(total_) + " checks failed:";
    for (const auto& f : failures_) d += " [" + f + "]";
    return {Verdict::kFail, d};
  }

 private:
  std::size_t total_ = 0;
  std::size_t failed_ = 0;
  std::vector<std::string> failures_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int precision = 3) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

std::vector<std::size_t> random_boundaries(Rng& rng, std::size_t n) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i < n; ++i) {
    if (rng.uniform01() < 0.2) out.push_back(i);
  }
  return out;
}

Outcome metric_oracles() {
  const auto t0 = std::chrono::steady_clock::now();
  Checks c;
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(49);
    const std::size_t k = 1 + rng.uniform_index(std::min<std::size_t>(n - 1, 10));
    const auto r = random_boundaries(rng, n);
    const auto h = random_boundaries(rng, n);
    c.expect(metrics::window_diff(r, h, n, k) == oracle::window_diff(r, h, n, k), "window_diff");
  }
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t na = 1 + rng.uniform_index(7), nb = 1 + rng.uniform_index(7);
    auto random_set = [&] {
      metrics::TokenSet s;
      for (std::size_t t = 0; t < 20; ++t) {
        if (rng.uniform01() < 0.3) s.push_back(t);
      }
      if (s.empty()) s.push_back(rng.uniform_index(20));
      return s;
    };
    std::vector<metrics::TokenSet> a(na), b(nb);
    for (auto& s : a) s = random_set();
    for (auto& s : b) s = random_set();
    std::vector<std::vector<double>> dense(na, std::vector<double>(nb));
    for (std::size_t i = 0; i < na; ++i) {
      for (std::size_t j = 0; j < nb; ++j) {
        std::vector<std::size_t> both;
        std::set_intersection(a[i].begin(), a[i].end(), b[j].begin(), b[j].end(), std::back_inserter(both));
        const double inter = static_cast<double>(both.size());
        dense[i][j] = std::min(inter / static_cast<double>(a[i].size()), inter / static_cast<double>(b[j].size()));
      }
    }
    const auto m = metrics::match_spans(a, b, {});
    c.expect(std::abs(m.assignment_total - oracle::best_assignment_total(dense)) <= 1e-12, "match_spans total");
  }
  const std::u32string alphabet = U"abcdeé€😀 ";
  for (int trial = 0; trial < 1000; ++trial) {
    auto random_string = [&] {
      std::u32string s;
      const std::size_t len = rng.uniform_index(25);
      for (std::size_t i = 0; i < len; ++i) s += alphabet[rng.uniform_index(alphabet.size())];
      return s;
    };
    const auto x = random_string(), y = random_string();
    c.expect(metrics::levenshtein(x, y) == oracle::levenshtein(x, y), "levenshtein");
  }
  const std::vector<std::string> vocab{"le", "la", "impot", "ecole", "il", "faut", ",", "."};
  for (int trial = 0; trial < 1000; ++trial) {
    auto random_tokens = [&] {
      std::vector<std::string> t(1 + rng.uniform_index(15));
      for (auto& w : t) w = vocab[rng.uniform_index(vocab.size())];
      return t;
    };
    const auto ref = random_tokens(), hyp = random_tokens();
    auto join = [](const std::vector<std::string>& t) {
      std::string s;
      for (const auto& w : t) s += (s.empty() ? "" : " ") + w;
      return s;
    };
    const double lcs = static_cast<double>(oracle::lcs_brute_force(ref, hyp));
    const double p = lcs / static_cast<double>(hyp.size()), r = lcs / static_cast<double>(ref.size());
    const double f1 = lcs == 0 ? 0.0 : 2 * p * r / (p + r);
    c.expect(std::abs(metrics::rouge(join(ref), join(hyp), metrics::RougeVariant::kRougeL).f1 - f1) <= 1e-12,
             "rouge-L");
  }
  const double elapsed = seconds_since(t0);
  c.expect(elapsed < 60.0, "runtime " + fmt(elapsed) + "s");
  return c.outcome("window_diff 1000, match_spans 500, levenshtein 1000, rouge-L 1000 agree with oracles in " +
                   fmt(elapsed) + "s");
}

Outcome incomplete_beta() {
  Checks c;
  double worst_uniform = 0.0, worst_power = 0.0, worst_sym = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double x = i / 1000.0;
    worst_uniform = std::max(worst_uniform, std::abs(quality::reg_inc_beta(x, 1, 1) - x));
    for (double a : {0.5, 2.0, 7.0}) {
      worst_power = std::max(worst_power, std::abs(quality::reg_inc_beta(x, a, 1) - std::pow(x, a)));
    }
  }
  Rng rng(99);
  for (int i = 0; i < 10000; ++i) {
    const double x = rng.uniform01();
    const double a = std::exp(std::log(0.05) + rng.uniform01() * std::log(1000.0));
    const double b = std::exp(std::log(0.05) + rng.uniform01() * std::log(1000.0));
    worst_sym = std::max(worst_sym,
                         std::abs(quality::reg_inc_beta(x, a, b) - (1.0 - quality::reg_inc_beta(1.0 - x, b, a))));
  }
  c.expect(worst_uniform <= 1e-9, "I_x(1,1) error " + fmt(worst_uniform));
  c.expect(worst_power <= 1e-8, "I_x(a,1) error " + fmt(worst_power));
  c.expect(worst_sym <= 1e-8, "symmetry error " + fmt(worst_sym));
  return c.outcome("max errors: uniform " + fmt(worst_uniform) + ", power " + fmt(worst_power) + ", symmetry " +
                   fmt(worst_sym));
}

Outcome quality_model() {
  const auto t0 = std::chrono::steady_clock::now();
  Checks c;
  // Reported (alpha, beta) per backend and the means they should give.
  const std::vector<std::pair<quality::BetaParams, double>> reported{
      {{1.75, 0.112}, 0.94}, {{1.80, 0.122}, 0.93}, {{1.57, 0.119}, 0.93}, {{1.10, 0.116}, 0.90}};
  std::string means;
  for (const auto& [p, expected] : reported) {
    const double m = quality::beta_mean(p);
    c.expect(std::abs(m - expected) <= 0.01, "mean " + fmt(m) + " vs " + fmt(expected));
    means += (means.empty() ? "" : "/") + fmt(m);
  }

  const std::vector<quality::BetaParams> truth{{6, 1}, {4, 1.5}, {3, 2}, {9, 2}};
  const auto data = oracle::simulate_threshold_process(truth, {0.7, 0.55, 0.4}, 2000, 1234);
  const auto fit = quality::fit_mle(data, {}, quality::LikelihoodForm::kStandardCensored);
  double worst = 0.0;
  for (std::size_t l = 0; l < truth.size(); ++l) {
    worst = std::max(worst, std::abs(fit.backends[l].mean - quality::beta_mean(truth[l])));
  }
  c.expect(worst <= 0.02, "recovered mean error " + fmt(worst));
  bool monotone = true;
  for (std::size_t i = 1; i < fit.trace.size(); ++i) monotone = monotone && fit.trace[i] >= fit.trace[i - 1];
  c.expect(monotone, "log-likelihood trace decreased");
  const double elapsed = seconds_since(t0);
  c.expect(elapsed < 120.0, "runtime " + fmt(elapsed) + "s");
  return c.outcome("reported means " + means + "; synthetic recovery max error " + fmt(worst) + " over " +
                   std::to_string(fit.iterations) + " iterations in " + fmt(elapsed) + "s");
}

Outcome significance() {
  Checks c;
  const auto r = eval::significance_tests({54, 336, 10});
  c.expect(r.chi_square.df == 2, "df");
  c.expect(r.chi_square.p < 1e-6, "chi-square p " + fmt(r.chi_square.p));
  c.expect(r.binomial.p && *r.binomial.p < 1e-6, "binomial p");
  double worst = 0.0;
  for (int i = 0; i <= 10000; ++i) {
    const double x = i / 100.0;
    worst = std::max(worst, std::abs(eval::chi2_survival(x, 2) - std::exp(-x / 2)));
  }
  c.expect(worst <= 1e-10, "df=2 survival error " + fmt(worst));
  return c.outcome("chi2 p " + fmt(r.chi_square.p) + ", binomial p " + fmt(r.binomial.p.value_or(1.0)) +
                   ", df=2 survival error " + fmt(worst));
}

Outcome pipeline_determinism() {
  Checks c;
  const auto corpus = fixture::pipeline_corpus();
  const auto a = fixture::fresh_dir("acceptance_pipeline_a");
  const auto b = fixture::fresh_dir("acceptance_pipeline_b");
  const auto d = fixture::fresh_dir("acceptance_pipeline_c");
  auto into = [](const fs::path& dir) {
    pipeline::RunOptions o;
    o.out_dir = dir;
    return o;
  };
  const auto out = pipeline::run_corpus(corpus, fixture::pipeline_config(1), into(a));
  pipeline::run_corpus(corpus, fixture::pipeline_config(4), into(b));
  auto interrupted = into(d);
  interrupted.stop_after = 12;
  const auto partial = pipeline::run_corpus(corpus, fixture::pipeline_config(2), interrupted);
  c.expect(!partial.report.finished, "interrupted run finished");
  const auto resumed = pipeline::run_corpus(corpus, fixture::pipeline_config(3), into(d));
  c.expect(resumed.report.finished && resumed.report.resumed == 12, "resume");
  const auto bytes = fixture::output_bytes(a);
  c.expect(bytes == fixture::output_bytes(b), "parallel run differs");
  c.expect(bytes == fixture::output_bytes(d), "resumed run differs");

  std::size_t units = 0, aligned = 0;
  for (const auto& r : out.records) units += r.units.size();
  for_each_json_line(a / "alignment.jsonl", [&](const Json& j, std::size_t) {
    if (j.at("au_index").is_null()) return;
    const auto status = j.at("status").get<std::string>();
    c.expect(status == "exact" || status == "fuzzy", "unit aligned with status " + status);
    ++aligned;
  });
  c.expect(aligned == units && units > 0, "alignment rows " + std::to_string(aligned) + " vs units " +
                                              std::to_string(units));

  const auto stats = pipeline::corpus_stats(out.records, corpus);
  auto rows = stats.themes;
  rows.push_back(stats.total);
  for (const auto& row : rows) {
    if (row.statements + row.solutions + row.premises == 0) continue;
    const double sum = row.pct_statements + row.pct_solutions + row.pct_premises;
    c.expect(std::abs(sum - 100.0) <= 0.1, row.label + " percentages sum to " + fmt(sum));
  }
  return c.outcome(std::to_string(corpus.size()) + " contributions, 3 byte-identical runs (one resumed), " +
                   std::to_string(units) + " units all exact or fuzzy");
}

// Runs only when CLARIFY_GDN_DIR holds the release converted to this
// project's schema: contributions.jsonl and records.jsonl.
Outcome gdn_reproduction() {
  const char* env = std::getenv("CLARIFY_GDN_DIR");
  if (!env) return {Verdict::kSkip, "CLARIFY_GDN_DIR not set; released annotations not available"};
  const fs::path dir = env;
  if (!fs::exists(dir / "contributions.jsonl") || !fs::exists(dir / "records.jsonl")) {
    return {Verdict::kSkip, dir.string() + " lacks contributions.jsonl or records.jsonl"};
  }
  Checks c;
  const auto corpus = read_contributions(dir / "contributions.jsonl");
  const auto records = read_records(dir / "records.jsonl");
  const auto stats = pipeline::corpus_stats(records, corpus);
  struct Row {
    const char* label;
    std::size_t contributions, units, statements, solutions, premises;
  };
  const std::vector<Row> expected{{"taxation", 312, 594, 175, 556, 202},
                                  {"ecology", 305, 590, 187, 543, 183},
                                  {"state_organization", 308, 577, 197, 532, 190},
                                  {"democracy", 306, 524, 212, 474, 187},
                                  {"total", 1231, 2285, 771, 2105, 762}};
  auto rows = stats.themes;
  rows.push_back(stats.total);
  for (const auto& e : expected) {
    auto it = std::find_if(rows.begin(), rows.end(), [&](const auto& r) { return r.label == e.label; });
    c.expect(it != rows.end(), std::string("row ") + e.label);
    if (it == rows.end()) continue;
    c.expect(it->contributions == e.contributions && it->units == e.units && it->statements == e.statements &&
                 it->solutions == e.solutions && it->premises == e.premises,
             std::string("counts for ") + e.label);
  }
  std::string detail = "corpus_stats checked";

  std::map<std::string, Contribution> by_id;
  for (const auto& x : corpus) by_id.emplace(x.id, x);
  const auto pairs = metrics::pair_double_annotations(records, by_id);
  if (!pairs.empty()) {
    const auto rep = metrics::agreement_report(pairs, {0.5}, 15);
    const auto& prf = rep.span_prf.at(0.5);
    c.expect(std::abs(prf.micro.f1 - 0.71) <= 0.02, "micro F1 " + fmt(prf.micro.f1));
    c.expect(std::abs(prf.macro.f1 - 0.76) <= 0.02, "macro F1 " + fmt(prf.macro.f1));
    c.expect(std::abs(rep.tag_ratio_mean - 0.65) <= 0.02, "tag agreement " + fmt(rep.tag_ratio_mean));
    detail += "; agreement on " + std::to_string(pairs.size()) + " doubles";
  }
  bool has_events = false;
  for (const auto& r : records) has_events = has_events || !r.events.empty();
  if (has_events) {
    const auto diag = pipeline::clarification_diagnostics(records, corpus);
    c.expect(std::abs(diag.mean.au_llm.levenshtein - 128) <= 5, "AU->LLM " + fmt(diag.mean.au_llm.levenshtein));
    c.expect(std::abs(diag.mean.au_final.levenshtein - 87) <= 5, "AU->final " + fmt(diag.mean.au_final.levenshtein));
    c.expect(std::abs(diag.mean.llm_final.levenshtein - 76) <= 5,
             "LLM->final " + fmt(diag.mean.llm_final.levenshtein));
    c.expect(std::abs(diag.mean.au_llm_unmodified.levenshtein - 145) <= 5,
             "AU->LLM=final " + fmt(diag.mean.au_llm_unmodified.levenshtein));
    detail += "; edit-distance diagnostics";
  }
  return c.outcome(detail);
}

Outcome service_integrity() {
  Checks c;
  const auto crash = fixture::crash_replay(fixture::fresh_dir("acceptance_crash"), 50, 4242);
  c.expect(crash.crashes == 50 && crash.mismatches == 0 && crash.untruncated == 0,
           std::to_string(crash.mismatches) + " replay mismatches");

  fixture::ServiceSetup s;
  s.contributions = 1231;
  s.overlap = 322.0 / 1231.0;
  auto svc = fixture::make_service(s);
  c.expect(svc->doubles().size() == 322, "doubles " + std::to_string(svc->doubles().size()));
  std::mt19937_64 rng(17);
  for (bool progress = true; progress;) {
    progress = false;
    for (std::size_t a = 0; a < 3; ++a) {
      const auto who = fixture::account_id(a);
      const auto task = svc->next_task(who);
      if (task.kind != service::Task::Kind::kTask) continue;
      c.expect(fixture::annotate(*svc, who, task, rng).accepted, "submission rejected");
      progress = true;
    }
  }
  const auto st = svc->state();
  c.expect(st.assignments == 1553, "assignments " + std::to_string(st.assignments));
  std::map<std::string, std::set<std::string>> annotators;
  for (const auto& [key, r] : st.records) annotators[key.first].insert(key.second);
  for (const auto& [cid, who] : annotators) c.expect(who.size() == svc->target(cid), "annotators of " + cid);

  const auto data = svc->export_dataset({});
  std::size_t audited = 0;
  for (const auto& row : data.events) {
    if (!row.at("accepted").get<bool>()) continue;
    const double e = row.at("observed_quality").get<double>();
    const double again = fixture::rouge_l_oracle(row.at("final_text"), row.at("generated"));
    c.expect(std::abs(e - again) <= 1e-12, "e audit");
    ++audited;
  }
  return c.outcome("50 crash points replayed (" + std::to_string(crash.torn) + " torn), " +
                   std::to_string(st.assignments) + " assignments over " + std::to_string(annotators.size()) +
                   " ids, " + std::to_string(audited) + " accepted events re-derived");
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"metric-oracle equivalence", metric_oracles},
      {"incomplete beta accuracy", incomplete_beta},
      {"quality-model reproduction", quality_model},
      {"significance tests", significance},
      {"pipeline determinism", pipeline_determinism},
      {"conditional data reproduction", gdn_reproduction},
      {"service integrity", service_integrity},
  };
  bool ok = true;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {Verdict::kFail, std::string("exception: ") + e.what()};
    }
    const char* tag = o.verdict == Verdict::kPass ? "PASS" : o.verdict == Verdict::kFail ? "FAIL" : "SKIP";
    std::cout << tag << " " << name << ": " << o.detail << std::endl;
    ok = ok && o.verdict != Verdict::kFail;
  }
  return ok ? 0 : 1;
}
