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

#include "clarify/pipeline/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "clarify/core/error.hpp"
#include "clarify/core/rng.hpp"
#include "clarify/core/utf8.hpp"
#include "clarify/llm/parse.hpp"
#include "clarify/llm/prompts.hpp"

namespace clarify::pipeline {

namespace fs = std::filesystem;

void check_config(const PipelineConfig& c) {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::kInvalidArgument, m); };
  if (c.max_parallel < 1) fail("max_parallel must be at least 1");
  if (c.checkpoint_interval < 1) fail("checkpoint_interval must be at least 1");
  if (c.language != "fr" && c.language != "en") fail("language must be fr or en");
  std::set<std::string> names;
  for (const auto& b : c.backends) {
    llm::check_backend_config(b);
    if (!names.insert(b.name).second) fail("duplicate backend name: " + b.name);
  }
  for (const auto* stage : {&c.au_backend, &c.as_backend, &c.clarification_backend}) {
    if (!names.count(*stage)) fail("stage bound to unknown backend: '" + *stage + "'");
  }
}

void to_json(Json& j, const PipelineConfig& c) {
  j = Json{{"backends", c.backends},
           {"stages",
            {{"au_extraction", c.au_backend},
             {"as_detection", c.as_backend},
             {"clarification", c.clarification_backend}}},
           {"language", c.language},
           {"one_shot", c.one_shot},
           {"max_parallel", c.max_parallel},
           {"checkpoint_interval", c.checkpoint_interval},
           {"seed", c.seed}};
}

void from_json(const Json& j, PipelineConfig& c) {
  c = PipelineConfig{};
  c.backends = j.at("backends").get<std::vector<llm::BackendConfig>>();
  const auto& stages = j.at("stages");
  c.au_backend = stages.at("au_extraction").get<std::string>();
  c.as_backend = stages.at("as_detection").get<std::string>();
  c.clarification_backend = stages.at("clarification").get<std::string>();
  c.language = j.value("language", c.language);
  c.one_shot = j.value("one_shot", c.one_shot);
  c.max_parallel = j.value("max_parallel", c.max_parallel);
  c.checkpoint_interval = j.value("checkpoint_interval", c.checkpoint_interval);
  c.seed = j.value("seed", c.seed);
}

PipelineConfig load_pipeline_config(const fs::path& path) {
  PipelineConfig c;
  try {
    from_json(Json::parse(read_file(path)), c);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
  for (auto& b : c.backends) {
    if (!b.transcript.empty() && b.transcript.is_relative()) {
      b.transcript = path.parent_path() / b.transcript;
    }
  }
  check_config(c);
  return c;
}

UnitCounts& UnitCounts::operator+=(const UnitCounts& o) {
  units += o.units;
  fuzzy += o.fuzzy;
  failed += o.failed;
  overlapping += o.overlapping;
  without_segments += o.without_segments;
  statements += o.statements;
  solutions += o.solutions;
  premises += o.premises;
  segments_dropped += o.segments_dropped;
  reprompts += o.reprompts;
  misformulations += o.misformulations;
  return *this;
}

void to_json(Json& j, const UnitCounts& c) {
  j = Json{{"units", c.units},
           {"units_fuzzy", c.fuzzy},
           {"units_failed", c.failed},
           {"units_overlapping", c.overlapping},
           {"units_without_segments", c.without_segments},
           {"segments", {{"statement", c.statements}, {"solution", c.solutions}, {"premise", c.premises}}},
           {"segments_dropped", c.segments_dropped},
           {"reprompts", c.reprompts},
           {"misformulations", c.misformulations}};
}

void from_json(const Json& j, UnitCounts& c) {
  c.units = j.at("units").get<std::size_t>();
  c.fuzzy = j.at("units_fuzzy").get<std::size_t>();
  c.failed = j.at("units_failed").get<std::size_t>();
  c.overlapping = j.at("units_overlapping").get<std::size_t>();
  c.without_segments = j.at("units_without_segments").get<std::size_t>();
  const auto& s = j.at("segments");
  c.statements = s.at("statement").get<std::size_t>();
  c.solutions = s.at("solution").get<std::size_t>();
  c.premises = s.at("premise").get<std::size_t>();
  c.segments_dropped = j.at("segments_dropped").get<std::size_t>();
  c.reprompts = j.at("reprompts").get<std::size_t>();
  c.misformulations = j.at("misformulations").get<std::size_t>();
}

namespace {

Json alignment_json(const std::string& id, const AlignmentLog& a) {
  Json j{{"contribution_id", id},
         {"unit", a.unit},
         {"au_index", a.au_index ? Json(*a.au_index) : Json(nullptr)},
         {"status", to_string(a.status)},
         {"coverage", a.coverage}};
  if (!a.note.empty()) j["note"] = a.note;
  return j;
}

Json quarantine_json(const std::string& id, const Quarantine& q) {
  return Json{{"contribution_id", id}, {"stage", q.stage}, {"reason", q.reason}, {"raw", q.raw}};
}

}  // namespace

void to_json(Json& j, const ContributionOutcome& o) {
  Json align = Json::array();
  for (const auto& a : o.alignment) align.push_back(alignment_json(o.contribution_id, a));
  j = Json{{"contribution_id", o.contribution_id},
           {"record", o.record ? Json(*o.record) : Json(nullptr)},
           {"quarantine", o.quarantine ? quarantine_json(o.contribution_id, *o.quarantine) : Json(nullptr)},
           {"alignment", align},
           {"counts", o.counts}};
}

void from_json(const Json& j, ContributionOutcome& o) {
  o = ContributionOutcome{};
  o.contribution_id = j.at("contribution_id").get<std::string>();
  if (!j.at("record").is_null()) o.record = j.at("record").get<AnnotationRecord>();
  if (const auto& q = j.at("quarantine"); !q.is_null()) {
    o.quarantine = Quarantine{q.at("stage").get<std::string>(), q.at("reason").get<std::string>(),
                              q.at("raw").get<std::string>()};
  }
  for (const auto& a : j.at("alignment")) {
    AlignmentLog log;
    log.unit = a.at("unit").get<std::size_t>();
    if (!a.at("au_index").is_null()) log.au_index = a.at("au_index").get<std::size_t>();
    const auto status = a.at("status").get<std::string>();
    log.status = status == "exact"   ? AlignStatus::kExact
                 : status == "fuzzy" ? AlignStatus::kFuzzyFlagged
                                     : AlignStatus::kFailed;
    log.coverage = a.at("coverage").get<double>();
    log.note = a.value("note", "");
    o.alignment.push_back(std::move(log));
  }
  o.counts = j.at("counts").get<UnitCounts>();
}

namespace {

std::string corrective_message(const std::string& language) {
  if (language == "en") {
    return "Your answer does not follow the requested format. Answer again using only that format, "
           "with nothing before or after it.";
  }
  return "Ta réponse ne respecte pas le format demandé. Réponds à nouveau en utilisant uniquement ce "
         "format, sans rien ajouter avant ou après.";
}

struct ParseFailed {
  std::string stage;
  std::string reason;
  std::string raw;
};

// render -> complete -> parse, with one corrective re-prompt on a parse error.
template <typename Parse>
auto run_stage(llm::Stage stage, llm::ChatBackend& backend, const llm::Vars& vars,
               const llm::RenderOptions& ro, UnitCounts& counts, Parse parse) -> decltype(parse(std::string{})) {
  auto messages = llm::render_prompt(stage, vars, ro);
  auto raw = backend.complete(messages).text;
  try {
    return parse(raw);
  } catch (const llm::StageParseError&) {
    ++counts.reprompts;
  }
  messages.push_back({"assistant", raw});
  messages.push_back({"user", corrective_message(ro.language)});
  raw = backend.complete(messages).text;
  try {
    return parse(raw);
  } catch (const llm::StageParseError& e) {
    throw ParseFailed{llm::to_string(stage), e.what(), raw};
  }
}

// Source spans of the AU-text range [a, b), split at span joints.
std::vector<CharSpan> map_to_source(const std::vector<CharSpan>& unit_spans, CharSpan r) {
  std::vector<CharSpan> out;
  std::size_t offset = 0;
  for (const auto& s : unit_spans) {
    const std::size_t lo = std::max(r.start, offset), hi = std::min(r.end, offset + s.size());
    if (lo < hi) out.push_back({s.start + (lo - offset), s.start + (hi - offset)});
    offset += s.size() + 1;  // joining space
  }
  return out;
}

bool overlaps_any(const std::vector<CharSpan>& spans, const std::vector<CharSpan>& taken) {
  for (const auto& a : spans) {
    for (const auto& b : taken) {
      if (a.overlaps(b)) return true;
    }
  }
  return false;
}

}  // namespace

ContributionOutcome process_contribution(const Contribution& c, const StageBackends& backends,
                                         const StageOptions& opts) {
  if (!backends.au_extraction || !backends.as_detection || !backends.clarification) {
    throw Error(ErrorCode::kInvalidArgument, "every stage needs a backend");
  }
  namespace ph = llm::placeholder;
  ContributionOutcome out;
  out.contribution_id = c.id;
  UnitCounts& counts = out.counts;
  llm::RenderOptions ro{opts.language, llm::kDefaultVariant, opts.one_shot};
  llm::RenderOptions clarif_ro{opts.language, llm::kPipelineVariant, opts.one_shot};

  try {
    const auto units = run_stage(llm::Stage::kAuExtraction, *backends.au_extraction,
                                 {{ph::kContribution, c.text}}, ro, counts, llm::parse_unit_list);

    AnnotationRecord record;
    record.contribution_id = c.id;
    record.annotator_id = kPipelineAnnotator;
    record.phase = Phase::kAutomatic;
    record.status = RecordStatus::kCompleted;
    std::vector<CharSpan> taken;

    for (std::size_t i = 0; i < units.size(); ++i) {
      AlignmentLog log;
      log.unit = i;
      const auto aligned = align_extractive(c.text, units[i]);
      log.status = aligned.status;
      log.coverage = aligned.coverage;
      if (aligned.status == AlignStatus::kFailed) {
        ++counts.failed;
        log.note = "not found in the contribution";
        out.alignment.push_back(std::move(log));
        continue;
      }
      if (overlaps_any(aligned.spans, taken)) {
        ++counts.overlapping;
        log.note = "overlaps an earlier unit";
        out.alignment.push_back(std::move(log));
        continue;
      }

      ArgumentativeUnit unit;
      unit.spans = aligned.spans;
      const std::string au_text = unit_text(unit, c.text);
      const llm::Vars vars{{ph::kContribution, c.text}, {ph::kUnit, au_text}};

      const auto typed = run_stage(llm::Stage::kAsDetection, *backends.as_detection, vars, ro, counts,
                                   [](const std::string& raw) { return llm::parse_typed_segments(raw); });
      std::vector<CharSpan> seg_taken;
      for (const auto& seg : typed) {
        const auto sa = align_extractive(au_text, seg.text);
        std::vector<CharSpan> pieces;
        for (const auto& r : sa.spans) {
          for (const auto& p : map_to_source(unit.spans, r)) pieces.push_back(p);
        }
        if (sa.status == AlignStatus::kFailed || pieces.empty() || overlaps_any(pieces, seg_taken)) {
          ++counts.segments_dropped;
          continue;
        }
        for (const auto& p : pieces) {
          unit.segments.push_back({p, seg.type});
          seg_taken.push_back(p);
        }
        switch (seg.type) {
          case SegmentType::kStatement:
            ++counts.statements;
            break;
          case SegmentType::kSolution:
            ++counts.solutions;
            break;
          case SegmentType::kPremise:
            ++counts.premises;
            break;
        }
      }
      if (unit.segments.empty()) {
        ++counts.without_segments;
        log.note = "no segment aligned";
        out.alignment.push_back(std::move(log));
        continue;
      }
      std::sort(unit.segments.begin(), unit.segments.end(),
                [](const LabeledSegment& a, const LabeledSegment& b) { return a.span < b.span; });

      const auto clarified =
          run_stage(llm::Stage::kClarification, *backends.clarification, vars, clarif_ro, counts,
                    llm::parse_clarification);
      if (clarified.misformulation) ++counts.misformulations;
      unit.clarification = clarified.text;
      unit.source_model = backends.clarification->config().model.empty()
                              ? backends.clarification->config().name
                              : backends.clarification->config().model;

      if (aligned.status == AlignStatus::kFuzzyFlagged) ++counts.fuzzy;
      ++counts.units;
      log.au_index = record.units.size();
      out.alignment.push_back(std::move(log));
      taken.insert(taken.end(), unit.spans.begin(), unit.spans.end());
      record.units.push_back(std::move(unit));
    }

    if (record.units.empty()) {
      out.quarantine = Quarantine{"alignment", "no unit survived alignment", ""};
    } else {
      out.record = std::move(record);
    }
  } catch (const ParseFailed& f) {
    out.quarantine = Quarantine{f.stage, f.reason, f.raw};
  } catch (const Error& e) {
    throw Error(e.code(), "contribution " + c.id + ": " + e.what());
  }
  if (out.quarantine) {
    // Keep the alignment log but no partial record or unit counts.
    const auto reprompts = counts.reprompts;
    counts = UnitCounts{};
    counts.reprompts = reprompts;
  }
  return out;
}

Json to_json(const RunReport& r) {
  return Json{{"contributions", r.contributions},
              {"records", r.records},
              {"quarantined", r.quarantined},
              {"counts", r.counts},
              {"config_hash", r.config_hash}};
}

namespace {

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Only settings that change the output take part.
std::string config_hash(const PipelineConfig& cfg) {
  Json backends = Json::array();
  for (const auto& b : cfg.backends) {
    backends.push_back({{"name", b.name}, {"kind", b.kind}, {"model", b.model}, {"temperature", b.temperature}});
  }
  Json j{{"backends", backends},
         {"stages", {cfg.au_backend, cfg.as_backend, cfg.clarification_backend}},
         {"language", cfg.language},
         {"one_shot", cfg.one_shot}};
  return hex64(fnv1a(j.dump()));
}

std::string corpus_hash(const std::vector<const Contribution*>& sorted) {
  std::uint64_t h = fnv1a("");
  for (const auto* c : sorted) h = fnv1a(Json(*c).dump() + "\n", h);
  return hex64(h);
}

class Checkpoint {
 public:
  Checkpoint(fs::path dir, std::string config_hash, std::string corpus_hash)
      : dir_(std::move(dir)), config_hash_(std::move(config_hash)), corpus_hash_(std::move(corpus_hash)) {}

  // Loads committed shards. Throws Error(kCorruption) on any inconsistency.
  std::vector<ContributionOutcome> load() {
    std::vector<ContributionOutcome> out;
    const auto manifest_path = dir_ / "manifest.json";
    if (!fs::exists(manifest_path)) return out;
    Json manifest;
    try {
      manifest = Json::parse(read_file(manifest_path));
      if (manifest.at("config_hash") != config_hash_) corrupt("checkpoint was written with another configuration");
      if (manifest.at("corpus_hash") != corpus_hash_) corrupt("checkpoint was written for another corpus");
      for (const auto& shard : manifest.at("shards")) {
        const auto file = shard.at("file").get<std::string>();
        const auto path = dir_ / file;
        if (!fs::exists(path)) corrupt("missing shard " + file);
        const auto content = read_file(path);
        if (hex64(fnv1a(content)) != shard.at("hash").get<std::string>()) corrupt("hash mismatch in shard " + file);
        std::istringstream in(content);
        for_each_json_line(in, path.string(),
                           [&](const Json& j, std::size_t) { out.push_back(j.get<ContributionOutcome>()); });
        shards_.push_back(shard);
      }
    } catch (const nlohmann::json::exception& e) {
      corrupt(std::string("unreadable checkpoint: ") + e.what());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kCorruption) throw;
      corrupt(e.what());
    }
    return out;
  }

  void reset() {
    fs::remove_all(dir_);
    shards_.clear();
  }

  // Writes a shard, then commits it by rewriting the manifest.
  void commit(const std::vector<ContributionOutcome>& batch) {
    if (batch.empty()) return;
    fs::create_directories(dir_);
    char name[32];
    std::snprintf(name, sizeof name, "shard_%06zu.jsonl", shards_.size());
    std::ostringstream content;
    for (const auto& o : batch) content << Json(o).dump() << '\n';
    write_file_atomic(dir_ / name, content.str());
    shards_.push_back({{"file", name}, {"hash", hex64(fnv1a(content.str()))}, {"count", batch.size()}});
    Json manifest{{"version", 1}, {"config_hash", config_hash_}, {"corpus_hash", corpus_hash_}, {"shards", shards_}};
    write_file_atomic(dir_ / "manifest.json", manifest.dump(2) + "\n");
  }

 private:
  [[noreturn]] void corrupt(const std::string& why) const {
    throw Error(ErrorCode::kCorruption, dir_.string() + ": " + why +
                                            " (rerun with the discard-checkpoint option to start over)");
  }

  fs::path dir_;
  std::string config_hash_;
  std::string corpus_hash_;
  Json shards_ = Json::array();
};

void finalize(const fs::path& out_dir, const std::vector<ContributionOutcome>& outcomes, const RunReport& report) {
  std::ostringstream records, quarantine, alignment;
  for (const auto& o : outcomes) {
    if (o.record) records << Json(*o.record).dump() << '\n';
    if (o.quarantine) quarantine << quarantine_json(o.contribution_id, *o.quarantine).dump() << '\n';
    for (const auto& a : o.alignment) alignment << alignment_json(o.contribution_id, a).dump() << '\n';
  }
  write_file_atomic(out_dir / "records.jsonl", records.str());
  write_file_atomic(out_dir / "quarantine.jsonl", quarantine.str());
  write_file_atomic(out_dir / "alignment.jsonl", alignment.str());
  write_file_atomic(out_dir / "report.json", to_json(report).dump(2) + "\n");
}

}  // namespace

RunOutput run_corpus(const std::vector<Contribution>& corpus, const PipelineConfig& cfg,
                     const std::map<std::string, std::shared_ptr<llm::ChatBackend>>& backends,
                     const RunOptions& opts) {
  check_config(cfg);
  auto backend = [&](const std::string& name) {
    auto it = backends.find(name);
    if (it == backends.end() || !it->second) {
      throw Error(ErrorCode::kInvalidArgument, "no backend instance named '" + name + "'");
    }
    return it->second.get();
  };
  const StageBackends stages{backend(cfg.au_backend), backend(cfg.as_backend), backend(cfg.clarification_backend)};
  const StageOptions stage_opts{cfg.language, cfg.one_shot};

  std::vector<const Contribution*> sorted;
  for (const auto& c : corpus) sorted.push_back(&c);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->id < b->id; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i]->id == sorted[i - 1]->id) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate contribution id: " + sorted[i]->id);
    }
  }

  RunReport report;
  report.contributions = sorted.size();
  report.config_hash = config_hash(cfg);
  fs::create_directories(opts.out_dir);
  Checkpoint checkpoint(opts.out_dir / "checkpoint", report.config_hash, corpus_hash(sorted));

  std::vector<ContributionOutcome> done;
  try {
    done = checkpoint.load();
  } catch (const Error& e) {
    if (!opts.discard_corrupt_checkpoint) throw;
    checkpoint.reset();
    done.clear();
  }
  report.resumed = done.size();

  std::set<std::string> done_ids;
  for (const auto& o : done) done_ids.insert(o.contribution_id);
  std::vector<const Contribution*> pending;
  for (const auto* c : sorted) {
    if (!done_ids.count(c->id)) pending.push_back(c);
  }
  Rng(cfg.seed).shuffle(pending);
  if (opts.stop_after && *opts.stop_after < pending.size()) pending.resize(*opts.stop_after);

  std::mutex mu;
  std::vector<ContributionOutcome> batch;
  std::exception_ptr failure;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};

  auto worker = [&] {
    while (!stop.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= pending.size()) return;
      try {
        auto outcome = process_contribution(*pending[i], stages, stage_opts);
        std::lock_guard lock(mu);
        batch.push_back(std::move(outcome));
        ++report.processed;
        if (batch.size() >= cfg.checkpoint_interval) {
          checkpoint.commit(batch);
          done.insert(done.end(), std::make_move_iterator(batch.begin()), std::make_move_iterator(batch.end()));
          batch.clear();
        }
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        stop = true;
      }
    }
  };
  const std::size_t n_threads = std::max<std::size_t>(1, std::min(cfg.max_parallel, pending.size()));
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  checkpoint.commit(batch);
  done.insert(done.end(), std::make_move_iterator(batch.begin()), std::make_move_iterator(batch.end()));
  batch.clear();
  if (failure) std::rethrow_exception(failure);

  std::sort(done.begin(), done.end(),
            [](const auto& a, const auto& b) { return a.contribution_id < b.contribution_id; });
  RunOutput out;
  for (auto& o : done) {
    report.counts += o.counts;
    if (o.quarantine) ++report.quarantined;
    if (o.record) out.records.push_back(*o.record);
  }
  report.records = out.records.size();
  report.finished = done.size() == sorted.size();
  if (report.finished) finalize(opts.out_dir, done, report);
  out.report = report;
  return out;
}

RunOutput run_corpus(const std::vector<Contribution>& corpus, const PipelineConfig& cfg, const RunOptions& opts) {
  check_config(cfg);
  std::map<std::string, std::shared_ptr<llm::ChatBackend>> backends;
  for (const auto& b : cfg.backends) backends[b.name] = llm::make_backend(b);
  return run_corpus(corpus, cfg, backends, opts);
}

}  // namespace clarify::pipeline
