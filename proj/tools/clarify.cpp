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

// Command-line front end: corpus preparation, agreement metrics, quality
// fitting, the extraction pipeline, cluster evaluation and the annotation
// server.

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <map>

#include "clarify/core/error.hpp"
#include "clarify/core/json_io.hpp"
#include "clarify/eval/clusters.hpp"
#include "clarify/eval/judge.hpp"
#include "clarify/ingest/ingest.hpp"
#include "clarify/metrics/agreement.hpp"
#include "clarify/pipeline/runner.hpp"
#include "clarify/pipeline/stats.hpp"
#include "clarify/quality/events.hpp"
#include "clarify/quality/model.hpp"
#include "clarify/service/http.hpp"

using namespace clarify;
namespace fs = std::filesystem;

namespace {

void emit(const Json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    write_file_atomic(out, j.dump(2) + "\n");
  }
}

std::map<std::string, Contribution> by_id(const std::vector<Contribution>& corpus) {
  std::map<std::string, Contribution> out;
  for (const auto& c : corpus) out.emplace(c.id, c);
  return out;
}

service::HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clarify: argument annotation and clarification toolkit"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Normalize a CSV/JSONL export into contributions JSONL");
  std::string in_path, out_path, summary_path;
  ingest::IngestConfig icfg;
  std::size_t sample = 0;
  ingest->add_option("--input", in_path, "CSV or JSONL with id, theme, text")->required()->check(CLI::ExistingFile);
  ingest->add_option("--out", out_path, "Contributions JSONL")->required();
  ingest->add_option("--min-chars", icfg.min_chars, "Minimum length in characters")->capture_default_str();
  ingest->add_option("--max-chars", icfg.max_chars, "Maximum length in characters")->capture_default_str();
  ingest->add_option("--sample", sample, "Stratified sample size (0 keeps everything)");
  ingest->add_option("--seed", icfg.seed, "Sampling seed");
  ingest->add_option("--summary", summary_path, "Write the corpus summary here instead of stdout");

  // metrics
  auto* metrics = app.add_subcommand("metrics", "Agreement metrics");
  metrics->require_subcommand(1);
  auto* agree = metrics->add_subcommand("agree", "Agreement between two annotation sets");
  std::string a_path, b_path, corpus_path, report_out;
  std::vector<double> lambdas{0.5};
  std::size_t window_k = 15;
  agree->add_option("--a", a_path, "Records JSONL (or both annotators when --b is omitted)")
      ->required()
      ->check(CLI::ExistingFile);
  agree->add_option("--b", b_path, "Records JSONL of the second annotation set")->check(CLI::ExistingFile);
  agree->add_option("--corpus", corpus_path, "Contributions JSONL")->required()->check(CLI::ExistingFile);
  agree->add_option("--lambda", lambdas, "Span-match lambda values")->capture_default_str();
  agree->add_option("--k", window_k, "WindowDiff window")->capture_default_str();
  agree->add_option("--out", report_out, "Report JSON (default stdout)");

  // quality
  auto* quality = app.add_subcommand("quality", "Clarification quality model");
  quality->require_subcommand(1);
  auto* fit = quality->add_subcommand("fit", "Fit per-backend Beta parameters and thresholds");
  std::string events_path, form = "censored", phase, fit_out;
  quality::FitConfig fcfg;
  fit->add_option("--events", events_path, "Exported clarification events JSONL")
      ->required()
      ->check(CLI::ExistingFile);
  fit->add_option("--form", form, "Likelihood form")->check(CLI::IsMember({"paper", "censored"}))->capture_default_str();
  fit->add_option("--phase", phase, "Only events from this phase");
  fit->add_option("--max-iters", fcfg.max_iters)->capture_default_str();
  fit->add_option("--learning-rate", fcfg.learning_rate)->capture_default_str();
  fit->add_option("--seed", fcfg.seed);
  fit->add_option("--out", fit_out, "FitResult JSON (default stdout)");

  // pipeline
  auto* pipeline = app.add_subcommand("pipeline", "Automatic extraction pipeline");
  pipeline->require_subcommand(1);
  auto* run = pipeline->add_subcommand("run", "Extract units, segments and clarifications");
  std::string config_path, out_dir;
  pipeline::RunOptions ropts;
  std::size_t stop_after = 0;
  run->add_option("--corpus", corpus_path, "Contributions JSONL")->required()->check(CLI::ExistingFile);
  run->add_option("--config", config_path, "Pipeline config JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--stop-after", stop_after, "Stop after this many contributions (resume later)");
  run->add_flag("--discard-corrupt-checkpoint", ropts.discard_corrupt_checkpoint,
                "Start over when the checkpoint is inconsistent");

  auto* stats = pipeline->add_subcommand("stats", "Per-theme unit and segment counts");
  std::string records_path;
  bool as_json = false;
  stats->add_option("--records", records_path, "Records JSONL")->required()->check(CLI::ExistingFile);
  stats->add_option("--corpus", corpus_path, "Contributions JSONL")->required()->check(CLI::ExistingFile);
  stats->add_flag("--json", as_json, "Print JSON instead of a table");

  auto* diag = pipeline->add_subcommand("diagnostics", "Clarification edit diagnostics per backend");
  std::string diag_out;
  diag->add_option("--records", records_path, "Records JSONL with clarification events")
      ->required()
      ->check(CLI::ExistingFile);
  diag->add_option("--corpus", corpus_path, "Contributions JSONL")->required()->check(CLI::ExistingFile);
  diag->add_option("--out", diag_out, "Report JSON (default stdout)");

  // clustereval
  auto* clustereval = app.add_subcommand("clustereval", "Compare two clusterings with an LLM judge");
  clustereval->require_subcommand(1);
  auto* crun = clustereval->add_subcommand("run", "Sample pairs, judge them and test significance");
  std::string ca, cb, backends_path, backend_name, alt = "two-sided", ceval_out, outcomes_out;
  std::size_t n_pairs = 100;
  std::uint64_t seed = 0;
  eval::JudgeOptions jopts;
  bool fixed_sides = false;
  crun->add_option("--a", ca, "Cluster assignment JSONL")->required()->check(CLI::ExistingFile);
  crun->add_option("--b", cb, "Cluster assignment JSONL")->required()->check(CLI::ExistingFile);
  crun->add_option("--n", n_pairs, "Pairs per theme")->capture_default_str();
  crun->add_option("--seed", seed, "Sampling and side seed");
  crun->add_option("--backends", backends_path, "Backend config JSON")->required()->check(CLI::ExistingFile);
  crun->add_option("--judge", backend_name, "Backend name (default: the first)");
  crun->add_option("--language", jopts.language)->check(CLI::IsMember({"fr", "en"}))->capture_default_str();
  crun->add_flag("--one-shot", jopts.one_shot);
  crun->add_flag("--fixed-sides", fixed_sides, "Always show clustering A first");
  crun->add_option("--parallel", jopts.max_parallel)->capture_default_str();
  crun->add_option("--alternative", alt)->check(CLI::IsMember({"two-sided", "greater", "less"}))->capture_default_str();
  crun->add_option("--outcomes", outcomes_out, "Per-item outcomes JSONL");
  crun->add_option("--out", ceval_out, "Report JSON (default stdout)");

  // serve
  auto* serve = app.add_subcommand("serve", "Run the annotation server");
  std::string campaign_path, host = "127.0.0.1", static_dir;
  int port = 8080;
  bool check_only = false;
  serve->add_option("--campaign", campaign_path, "Campaign config JSON")->required()->check(CLI::ExistingFile);
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("--static", static_dir, "Annotation UI bundle directory");
  serve->add_flag("--check", check_only, "Load the campaign, print a summary and exit");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      if (sample > 0) icfg.sample_size = sample;
      auto prepared = ingest::prepare_corpus(ingest::read_raw(in_path), icfg);
      auto contributions = std::move(prepared.contributions);
      if (icfg.sample_size) {
        auto s = ingest::stratified_sample(contributions, icfg);
        for (const auto& w : s.warnings) std::cerr << "warning: " << w << '\n';
        contributions = std::move(s.contributions);
      }
      std::ostringstream os;
      write_jsonl(os, contributions);
      write_file_atomic(out_path, os.str());
      emit(ingest::to_json(prepared.summary, icfg.length_bins), summary_path);
    } else if (*agree) {
      const auto corpus = by_id(read_contributions(corpus_path));
      // Pairs point into these vectors.
      const auto a = read_records(a_path);
      const auto b = b_path.empty() ? std::vector<AnnotationRecord>{} : read_records(b_path);
      const auto pairs = b_path.empty() ? metrics::pair_double_annotations(a, corpus)
                                        : metrics::pair_by_contribution(a, b, corpus);
      emit(metrics::to_json(metrics::agreement_report(pairs, lambdas, window_k)), report_out);
    } else if (*fit) {
      const auto data = quality::read_event_file(events_path, phase.empty() ? std::nullopt : std::optional(phase));
      emit(quality::to_json(quality::fit_mle(data, fcfg, quality::parse_form(form))), fit_out);
    } else if (*run) {
      if (stop_after > 0) ropts.stop_after = stop_after;
      ropts.out_dir = out_dir;
      const auto out = pipeline::run_corpus(read_contributions(corpus_path),
                                            pipeline::load_pipeline_config(config_path), ropts);
      auto j = to_json(out.report);
      j["finished"] = out.report.finished;
      j["resumed"] = out.report.resumed;
      j["processed"] = out.report.processed;
      emit(j, "");
    } else if (*stats) {
      const auto s = pipeline::corpus_stats(read_records(records_path), read_contributions(corpus_path));
      if (as_json) {
        emit(to_json(s), "");
      } else {
        std::cout << pipeline::format_table(s);
      }
    } else if (*diag) {
      emit(to_json(pipeline::clarification_diagnostics(read_records(records_path), read_contributions(corpus_path))),
           diag_out);
    } else if (*crun) {
      const auto assign_a = eval::read_assignment(fs::path(ca));
      const auto assign_b = eval::read_assignment(fs::path(cb));
      const auto configs = llm::load_backend_configs(backends_path);
      if (configs.empty()) throw Error(ErrorCode::kInvalidArgument, "no backend configured");
      auto chosen = configs.front();
      if (!backend_name.empty()) {
        auto it = std::find_if(configs.begin(), configs.end(), [&](const auto& c) { return c.name == backend_name; });
        if (it == configs.end()) throw Error(ErrorCode::kInvalidArgument, "unknown backend " + backend_name);
        chosen = *it;
      }
      auto backend = llm::make_backend(chosen);
      jopts.seed = seed;
      jopts.randomize_sides = !fixed_sides;
      const auto ev = eval::evaluate_clusterings(assign_a, assign_b, n_pairs, *backend, jopts);
      for (const auto* sample : {&ev.sample_a, &ev.sample_b}) {
        for (const auto& [theme, missing] : sample->shortfall) {
          std::cerr << "warning: " << to_string(theme) << " is short of " << missing << " pairs\n";
        }
      }
      const auto& report = ev.report;
      if (!outcomes_out.empty()) {
        std::ostringstream os;
        for (const auto& o : report.outcomes) os << to_json(o).dump() << '\n';
        write_file_atomic(outcomes_out, os.str());
      }
      emit(eval::evaluation_report(report, eval::parse_alternative(alt)), ceval_out);
    } else if (*serve) {
      const auto cfg = service::load_campaign(campaign_path);
      auto svc = service::AnnotationService::open(cfg);
      if (check_only) {
        const auto st = svc->state();
        emit({{"campaign", cfg.name},
              {"doubles", svc->doubles().size()},
              {"records", st.records.size()},
              {"last_seq", st.last_seq}},
             "");
        return 0;
      }
      service::HttpServer server(*svc, {static_dir});
      const int bound = server.bind(host, port);
      std::cerr << "listening on " << host << ':' << bound << '\n';
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      server.serve();
      g_server = nullptr;
      svc->snapshot();
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return 2;
  }
  return 0;
}
