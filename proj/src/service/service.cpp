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

#include "clarify/service/service.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <mutex>

#include "clarify/core/error.hpp"
#include "clarify/core/rng.hpp"
#include "clarify/core/utf8.hpp"
#include "clarify/core/validate.hpp"
#include "clarify/llm/prompts.hpp"
#include "clarify/metrics/segmentation.hpp"
#include "clarify/metrics/agreement.hpp"
#include "clarify/metrics/strings.hpp"
#include "clarify/metrics/tokenize.hpp"

namespace clarify::service {

namespace fs = std::filesystem;

void check_campaign(const CampaignConfig& c) {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::kInvalidArgument, m); };
  if (!(c.overlap_fraction >= 0.0 && c.overlap_fraction <= 1.0)) fail("overlap_fraction must be in [0, 1]");
  if (!(c.phase2_start_fraction >= 0.0 && c.phase2_start_fraction <= 1.0)) {
    fail("phase2_start_fraction must be in [0, 1]");
  }
  if (c.pool.empty()) fail("backend pool is empty");
  if (!(c.lease_minutes > 0.0)) fail("lease_minutes must be positive");
  if (!(c.tutorial_lambda >= 0.0 && c.tutorial_lambda <= 1.0)) fail("tutorial_lambda must be in [0, 1]");
  if (c.language != "fr" && c.language != "en") fail("language must be fr or en");
  std::set<std::string> names;
  for (const auto& b : c.backends) names.insert(b.name);
  for (const auto& p : c.pool) {
    if (!names.count(p)) fail("pool names unknown backend '" + p + "'");
  }
}

void to_json(Json& j, const CampaignConfig& c) {
  j = Json{{"name", c.name},
           {"corpus", c.corpus.string()},
           {"accounts", c.accounts.string()},
           {"tutorial", c.tutorial.string()},
           {"data_dir", c.data_dir.string()},
           {"backends", c.backends},
           {"pool", c.pool},
           {"overlap_fraction", c.overlap_fraction},
           {"phase2_start_fraction", c.phase2_start_fraction},
           {"quota", c.quota ? Json(*c.quota) : Json(nullptr)},
           {"seed", c.seed},
           {"lease_minutes", c.lease_minutes},
           {"tutorial_lambda", c.tutorial_lambda},
           {"tutorial_min_f1", c.tutorial_min_f1},
           {"snapshot_interval", c.snapshot_interval},
           {"language", c.language},
           {"admin_token_env", c.admin_token_env}};
}

void from_json(const Json& j, CampaignConfig& c) {
  c = CampaignConfig{};
  c.name = j.value("name", c.name);
  c.corpus = j.at("corpus").get<std::string>();
  c.accounts = j.at("accounts").get<std::string>();
  c.tutorial = j.value("tutorial", std::string{});
  c.data_dir = j.value("data_dir", std::string{});
  c.backends = j.at("backends").get<std::vector<llm::BackendConfig>>();
  c.pool = j.at("pool").get<std::vector<std::string>>();
  c.overlap_fraction = j.value("overlap_fraction", c.overlap_fraction);
  c.phase2_start_fraction = j.value("phase2_start_fraction", c.phase2_start_fraction);
  if (j.contains("quota") && !j.at("quota").is_null()) c.quota = j.at("quota").get<std::size_t>();
  c.seed = j.value("seed", c.seed);
  c.lease_minutes = j.value("lease_minutes", c.lease_minutes);
  c.tutorial_lambda = j.value("tutorial_lambda", c.tutorial_lambda);
  c.tutorial_min_f1 = j.value("tutorial_min_f1", c.tutorial_min_f1);
  c.snapshot_interval = j.value("snapshot_interval", c.snapshot_interval);
  c.language = j.value("language", c.language);
  c.admin_token_env = j.value("admin_token_env", c.admin_token_env);
}

CampaignConfig load_campaign(const fs::path& path) {
  CampaignConfig c;
  try {
    from_json(Json::parse(read_file(path)), c);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
  const auto base = path.parent_path();
  for (auto* p : {&c.corpus, &c.accounts, &c.tutorial, &c.data_dir}) {
    if (!p->empty() && p->is_relative()) *p = base / *p;
  }
  for (auto& b : c.backends) {
    if (!b.transcript.empty() && b.transcript.is_relative()) b.transcript = base / b.transcript;
  }
  check_campaign(c);
  return c;
}

std::vector<Account> read_accounts(const fs::path& path) {
  std::vector<Account> out;
  try {
    const auto j = Json::parse(read_file(path));
    for (const auto& a : j.is_object() ? j.at("accounts") : j) {
      const auto id = a.at("id").get<std::string>();
      out.push_back({id, a.at("token").get<std::string>(), a.value("name", id)});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
  return out;
}

std::vector<TutorialItem> read_tutorial(const fs::path& path) {
  std::vector<TutorialItem> out;
  for_each_json_line(path, [&](const Json& j, std::size_t) {
    out.push_back({j.at("contribution").get<Contribution>(), j.at("units").get<std::vector<ArgumentativeUnit>>()});
  });
  return out;
}

std::set<std::string> select_doubles(const std::vector<Contribution>& corpus, double fraction, std::uint64_t seed) {
  std::vector<std::pair<std::uint64_t, std::string>> ranked;
  for (const auto& c : corpus) ranked.emplace_back(mix64(seed ^ fnv1a(c.id)), c.id);
  std::sort(ranked.begin(), ranked.end());
  const auto n = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(corpus.size())));
  std::set<std::string> out;
  for (std::size_t i = 0; i < n && i < ranked.size(); ++i) out.insert(ranked[i].second);
  return out;
}

std::int64_t system_clock_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::vector<Json> event_rows(const AnnotationRecord& record) {
  std::vector<Json> out;
  for (const auto& ev : record.events) {
    Json labels = Json::array();
    for (auto l : ev.error_labels) labels.push_back(to_string(l));
    out.push_back({{"contribution_id", record.contribution_id},
                   {"annotator_id", record.annotator_id},
                   {"phase", to_string(record.phase)},
                   {"au_index", ev.au_index},
                   {"backend", ev.backend},
                   {"attempt", ev.attempt},
                   {"accepted", ev.accepted},
                   {"observed_quality", ev.observed_quality ? Json(*ev.observed_quality) : Json(nullptr)},
                   {"error_labels", labels},
                   {"generated", ev.generated ? Json(*ev.generated) : Json(nullptr)},
                   {"final_text", ev.final_text ? Json(*ev.final_text) : Json(nullptr)}});
  }
  return out;
}

namespace {

double observed_quality(const std::string& generated, const std::string& final_text) {
  return metrics::rouge(final_text, generated, metrics::RougeVariant::kRougeL).f1;
}

// Structural rules a single draft unit must satisfy before generation.
std::vector<Violation> unit_violations(const ArgumentativeUnit& unit, const Contribution& c) {
  AnnotationRecord probe;
  probe.contribution_id = c.id;
  probe.units = {unit};
  std::vector<Violation> out;
  for (auto& v : validate_record(probe, c)) {
    if (v.rule.rfind("event", 0) != 0) out.push_back(std::move(v));
  }
  return out;
}

std::string joined(const ArgumentativeUnit& unit, const std::string& text, SegmentType kind) {
  std::string out;
  for (const auto& s : unit.segments) {
    if (s.kind != kind) continue;
    if (!out.empty()) out += ' ';
    out += utf8::substr(text, s.span.start, s.span.end);
  }
  return out;
}

}  // namespace

AnnotationService::AnnotationService(CampaignConfig cfg, std::vector<Contribution> corpus,
                                     std::vector<Account> accounts, std::vector<TutorialItem> tutorial,
                                     std::map<std::string, std::shared_ptr<llm::ChatBackend>> backends,
                                     ServiceOptions opts)
    : cfg_(std::move(cfg)),
      corpus_(std::move(corpus)),
      tutorial_(std::move(tutorial)),
      backends_(std::move(backends)),
      opts_(std::move(opts)) {
  check_campaign(cfg_);
  if (!opts_.clock) opts_.clock = system_clock_ms;
  for (std::size_t i = 0; i < corpus_.size(); ++i) {
    if (!corpus_index_.emplace(corpus_[i].id, i).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate contribution id " + corpus_[i].id);
    }
    rank_[corpus_[i].id] = mix64(derive_seed(cfg_.seed, "order") ^ fnv1a(corpus_[i].id));
  }
  for (const auto& t : tutorial_) {
    if (corpus_index_.count(t.contribution.id)) {
      throw Error(ErrorCode::kInvalidArgument, "tutorial id " + t.contribution.id + " is also a corpus id");
    }
  }
  std::set<std::string> ids;
  for (const auto& a : accounts) {
    if (a.token.empty() || !token_to_id_.emplace(a.token, a.id).second) {
      throw Error(ErrorCode::kInvalidArgument, "account tokens must be non-empty and unique");
    }
    if (!ids.insert(a.id).second) throw Error(ErrorCode::kInvalidArgument, "duplicate account id " + a.id);
    names_[a.id] = a.name.empty() ? a.id : a.name;
  }
  for (const auto& name : cfg_.pool) {
    if (!backends_.count(name) || !backends_.at(name)) {
      throw Error(ErrorCode::kInvalidArgument, "no backend instance for pool entry " + name);
    }
  }
  doubles_ = select_doubles(corpus_, cfg_.overlap_fraction, cfg_.seed);

  if (!cfg_.data_dir.empty()) {
    fs::create_directories(cfg_.data_dir);
    auto snap = read_snapshot(cfg_.data_dir / "snapshot.json");
    journal_ = std::make_unique<Journal>(cfg_.data_dir / "journal.jsonl", opts_.sync_journal);
    state_ = replay(journal_->existing(), std::move(snap));
  }
  for (const auto& a : accounts) state_.accounts[a.id];
}

std::unique_ptr<AnnotationService> AnnotationService::open(const CampaignConfig& cfg, ServiceOptions opts) {
  check_campaign(cfg);
  auto corpus = read_contributions(cfg.corpus);
  auto accounts = read_accounts(cfg.accounts);
  std::vector<TutorialItem> tutorial;
  if (!cfg.tutorial.empty()) tutorial = read_tutorial(cfg.tutorial);
  std::map<std::string, std::shared_ptr<llm::ChatBackend>> backends;
  for (const auto& b : cfg.backends) backends[b.name] = llm::make_backend(b);
  if (opts.admin_token.empty() && !cfg.admin_token_env.empty()) {
    if (const char* t = std::getenv(cfg.admin_token_env.c_str())) opts.admin_token = t;
  }
  return std::make_unique<AnnotationService>(cfg, std::move(corpus), std::move(accounts), std::move(tutorial),
                                             std::move(backends), std::move(opts));
}

std::string AnnotationService::authenticate(const std::string& token) const {
  auto it = token_to_id_.find(token);
  if (token.empty() || it == token_to_id_.end()) throw Error(ErrorCode::kAuthentication, "invalid token");
  return it->second;
}

void AnnotationService::require_admin(const std::string& token) const {
  if (opts_.admin_token.empty() || token != opts_.admin_token) {
    throw Error(ErrorCode::kAuthorization, "admin token required");
  }
}

std::int64_t AnnotationService::now() const { return std::max(opts_.clock(), state_.last_ts); }

void AnnotationService::commit(Json ev) {
  ev["seq"] = state_.last_seq + 1;
  if (!ev.contains("ts")) ev["ts"] = now();
  if (journal_) journal_->append(ev);
  service::apply(state_, ev);
  if (journal_ && cfg_.snapshot_interval > 0 && ++since_snapshot_ >= cfg_.snapshot_interval) {
    write_snapshot(cfg_.data_dir / "snapshot.json", state_);
    since_snapshot_ = 0;
  }
}

void AnnotationService::snapshot() {
  std::unique_lock lock(mu_);
  if (journal_) write_snapshot(cfg_.data_dir / "snapshot.json", state_);
  since_snapshot_ = 0;
}

const AccountProgress& AnnotationService::progress(const std::string& annotator) const {
  auto it = state_.accounts.find(annotator);
  if (it == state_.accounts.end()) throw Error(ErrorCode::kAuthentication, "unknown annotator " + annotator);
  return it->second;
}

bool AnnotationService::tutorial_done(const std::string& annotator) const {
  return progress(annotator).tutorial_passed >= tutorial_.size();
}

void AnnotationService::require_tutorial(const std::string& annotator) const {
  if (!tutorial_done(annotator)) throw Error(ErrorCode::kAuthorization, "tutorial not completed");
}

const Contribution* AnnotationService::find_contribution(const std::string& id) const {
  auto it = corpus_index_.find(id);
  return it == corpus_index_.end() ? nullptr : &corpus_[it->second];
}

std::size_t AnnotationService::target(const std::string& contribution_id) const {
  return doubles_.count(contribution_id) ? 2 : 1;
}

AccountInfo AnnotationService::account(const std::string& annotator) const {
  std::shared_lock lock(mu_);
  const auto& p = progress(annotator);
  return {annotator, names_.at(annotator), std::min(p.tutorial_passed, tutorial_.size()), tutorial_.size(),
          p.tutorial_passed >= tutorial_.size(), p.completed};
}

void AnnotationService::expire_leases(std::int64_t t) {
  std::vector<std::pair<std::string, std::string>> expired;
  for (const auto& [cid, lease] : state_.leases) {
    if (lease.expires_ms < t) expired.emplace_back(cid, lease.annotator);
  }
  for (const auto& [cid, who] : expired) {
    commit({{"type", event::kLeaseExpired}, {"annotator", who}, {"contribution_id", cid}, {"ts", t}});
  }
}

const Lease& AnnotationService::held_lease(const std::string& annotator, const std::string& cid, std::int64_t t) {
  auto it = state_.leases.find(cid);
  if (it == state_.leases.end() || it->second.annotator != annotator) {
    throw Error(ErrorCode::kConflict, "no lease on " + cid);
  }
  if (it->second.expires_ms < t) {
    commit({{"type", event::kLeaseExpired}, {"annotator", annotator}, {"contribution_id", cid}, {"ts", t}});
    throw Error(ErrorCode::kConflict, "lease on " + cid + " expired");
  }
  return it->second;
}

Task AnnotationService::next_task(const std::string& annotator) {
  std::unique_lock lock(mu_);
  const auto& p = progress(annotator);
  Task task;
  task.tutorial_total = tutorial_.size();
  if (p.tutorial_passed < tutorial_.size()) {
    task.kind = Task::Kind::kTutorial;
    task.tutorial_index = p.tutorial_passed;
    task.contribution = tutorial_[p.tutorial_passed].contribution;
    return task;
  }
  const auto t = now();
  expire_leases(t);

  auto fill = [&](const std::string& cid, const Lease& lease) {
    task.kind = Task::Kind::kTask;
    task.contribution = *find_contribution(cid);
    task.phase = lease.phase;
    task.expires_ms = lease.expires_ms;
    if (auto d = state_.drafts.find({cid, annotator}); d != state_.drafts.end()) task.draft = d->second;
    return task;
  };
  if (auto held = state_.lease_of(annotator)) return fill(*held, state_.leases.at(*held));
  if (cfg_.quota && p.completed >= *cfg_.quota) return task;

  const Contribution* best = nullptr;
  std::pair<std::size_t, std::uint64_t> best_key{};
  for (const auto& c : corpus_) {
    if (state_.leases.count(c.id) || state_.records.count({c.id, annotator})) continue;
    const auto done_it = state_.done.find(c.id);
    const std::size_t done = done_it == state_.done.end() ? 0 : done_it->second;
    if (done >= target(c.id)) continue;
    const std::pair<std::size_t, std::uint64_t> key{done, rank_.at(c.id)};
    if (!best || key < best_key) {
      best = &c;
      best_key = key;
    }
  }
  if (!best) return task;

  std::size_t finished = 0;
  for (const auto& [cid, n] : state_.done) finished += n > 0 && corpus_index_.count(cid);
  const bool phase2 = !corpus_.empty() && static_cast<double>(finished) >=
                                              cfg_.phase2_start_fraction * static_cast<double>(corpus_.size());
  const auto expires = t + static_cast<std::int64_t>(std::llround(cfg_.lease_minutes * 60000.0));
  commit({{"type", event::kAssigned},
          {"annotator", annotator},
          {"contribution_id", best->id},
          {"phase", to_string(phase2 ? Phase::kPhase2 : Phase::kPhase1)},
          {"expires_ms", expires},
          {"ts", t}});
  return fill(best->id, state_.leases.at(best->id));
}

std::string AnnotationService::pick_backend(const std::string& cid, const std::string& annotator, std::size_t au,
                                            std::size_t attempt) const {
  Rng rng(derive_seed(cfg_.seed, cid + '\x1f' + annotator + '\x1f' + std::to_string(au) + '\x1f' +
                                     std::to_string(attempt)));
  return cfg_.pool[rng.uniform_index(cfg_.pool.size())];
}

Regeneration AnnotationService::regenerate(const std::string& annotator, const std::string& cid, std::size_t au_index,
                                           const ArgumentativeUnit& unit) {
  std::string backend_name;
  std::size_t attempt = 0;
  std::uint64_t lease_seq = 0;
  llm::Messages messages;
  std::optional<ClarificationEvent> superseded;
  {
    std::unique_lock lock(mu_);
    require_tutorial(annotator);
    const auto* c = find_contribution(cid);
    if (!c) throw Error(ErrorCode::kNotFound, "unknown contribution " + cid);
    const Lease& lease = held_lease(annotator, cid, now());
    if (auto v = unit_violations(unit, *c); !v.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "invalid unit: " + v.front().rule + " " + v.front().message);
    }
    std::size_t prior = 0;
    if (auto d = state_.drafts.find({cid, annotator}); d != state_.drafts.end()) {
      if (auto a = d->second.find(au_index); a != d->second.end() && !a->second.empty()) {
        prior = a->second.size();
        const auto& last = a->second.back();
        superseded = ClarificationEvent{au_index, last.backend, last.attempt, false, std::nullopt, {},
                                        last.text, std::nullopt};
      }
    }
    if (prior > 0 && lease.phase == Phase::kPhase2) {
      throw Error(ErrorCode::kPolicy, "phase 2 keeps the first generated clarification");
    }
    attempt = prior + 1;
    lease_seq = lease.seq;
    backend_name = pick_backend(cid, annotator, au_index, attempt);
    namespace ph = llm::placeholder;
    llm::RenderOptions ro{cfg_.language, llm::kAnnotationVariant, false};
    messages = llm::render_prompt(llm::Stage::kClarification,
                                  {{ph::kContribution, c->text},
                                   {ph::kTheme, std::string(theme_title(c->theme, cfg_.language))},
                                   {ph::kStatements, joined(unit, c->text, SegmentType::kStatement)},
                                   {ph::kPremises, joined(unit, c->text, SegmentType::kPremise)},
                                   {ph::kSolutions, joined(unit, c->text, SegmentType::kSolution)}},
                                  ro);
  }

  std::string text;
  try {
    text = utf8::trim(backends_.at(backend_name)->complete(messages).text);
  } catch (const Error& e) {
    throw Error(ErrorCode::kBackend, "clarification backend " + backend_name + " failed: " + e.what());
  }

  std::unique_lock lock(mu_);
  auto it = state_.leases.find(cid);
  std::size_t now_prior = 0;
  if (auto d = state_.drafts.find({cid, annotator}); d != state_.drafts.end()) {
    if (auto a = d->second.find(au_index); a != d->second.end()) now_prior = a->second.size();
  }
  if (it == state_.leases.end() || it->second.seq != lease_seq || now_prior + 1 != attempt) {
    throw Error(ErrorCode::kConflict, "lease or draft changed during generation");
  }
  commit({{"type", event::kRegenerated},
          {"annotator", annotator},
          {"contribution_id", cid},
          {"au_index", au_index},
          {"attempt", attempt},
          {"backend", backend_name},
          {"text", text}});
  return {text, attempt, backend_name, superseded};
}

SubmitResult AnnotationService::submit_tutorial(const std::string& annotator, const AnnotationRecord& record,
                                                std::size_t index) {
  const auto& item = tutorial_[index];
  SubmitResult out;
  AnnotationRecord probe = record;
  probe.annotator_id = annotator;
  probe.events.clear();
  probe.status = RecordStatus::kCompleted;
  out.violations = validate_record(probe, item.contribution);
  if (!out.violations.empty()) return out;
  AnnotationRecord gold;
  gold.contribution_id = item.contribution.id;
  gold.units = item.gold;
  const auto tokens = metrics::tokenize(item.contribution.text);
  const auto counts = metrics::unit_match_counts(probe, gold, tokens, cfg_.tutorial_lambda);
  const double f1 = metrics::span_prf({counts}).micro.f1;
  out.tutorial_f1 = f1;
  out.tutorial_passed = f1 >= cfg_.tutorial_min_f1;
  out.accepted = out.tutorial_passed;
  commit({{"type", event::kTutorialSubmitted},
          {"annotator", annotator},
          {"item", index},
          {"f1", f1},
          {"passed", out.tutorial_passed}});
  return out;
}

SubmitResult AnnotationService::submit(const std::string& annotator, AnnotationRecord record) {
  std::unique_lock lock(mu_);
  const auto& p = progress(annotator);
  for (std::size_t i = 0; i < tutorial_.size(); ++i) {
    if (tutorial_[i].contribution.id != record.contribution_id) continue;
    if (p.tutorial_passed >= tutorial_.size()) throw Error(ErrorCode::kConflict, "tutorial already completed");
    if (i != p.tutorial_passed) throw Error(ErrorCode::kConflict, "tutorial items are validated in order");
    return submit_tutorial(annotator, record, i);
  }
  require_tutorial(annotator);
  const auto cid = record.contribution_id;
  const auto* c = find_contribution(cid);
  if (!c) throw Error(ErrorCode::kNotFound, "unknown contribution " + cid);

  const auto t = now();
  const auto previous = state_.records.find({cid, annotator});
  const auto lease_it = state_.leases.find(cid);
  const bool leased = lease_it != state_.leases.end() && lease_it->second.annotator == annotator;
  const bool resubmission = !leased && previous != state_.records.end();
  Phase phase = Phase::kPhase1;
  if (resubmission) {
    phase = previous->second.phase;
  } else {
    phase = held_lease(annotator, cid, t).phase;
  }

  // Client-side error labels per AU, taken from any event it sent.
  std::map<std::size_t, std::set<ErrorLabel>> labels;
  for (const auto& ev : record.events) labels[ev.au_index].insert(ev.error_labels.begin(), ev.error_labels.end());

  record.annotator_id = annotator;
  record.phase = phase;
  record.status = RecordStatus::kCompleted;
  record.skip_reason.reset();
  record.events.clear();

  SubmitResult out;
  auto add_accepted = [&](std::size_t au, const std::string& backend, std::size_t k, const std::string& generated) {
    const auto& unit = record.units[au];
    if (!unit.clarification || utf8::trim(*unit.clarification).empty()) {
      out.violations.push_back({"clarification_required", "units[" + std::to_string(au) + "]",
                                "a unit with a generated clarification needs a final clarification"});
      return;
    }
    ClarificationEvent ev;
    ev.au_index = au;
    ev.backend = backend;
    ev.attempt = k;
    ev.accepted = true;
    ev.generated = generated;
    ev.final_text = *unit.clarification;
    ev.observed_quality = observed_quality(generated, *unit.clarification);
    if (auto l = labels.find(au); l != labels.end()) ev.error_labels = l->second;
    record.events.push_back(std::move(ev));
  };

  if (resubmission) {
    for (const auto& ev : previous->second.events) {
      if (ev.au_index >= record.units.size()) continue;
      if (!ev.accepted) {
        record.events.push_back(ev);
      } else {
        add_accepted(ev.au_index, ev.backend, ev.attempt, ev.generated.value_or(""));
      }
    }
  } else if (auto d = state_.drafts.find({cid, annotator}); d != state_.drafts.end()) {
    for (const auto& [au, attempts] : d->second) {
      if (au >= record.units.size() || attempts.empty()) continue;
      for (std::size_t k = 0; k + 1 < attempts.size(); ++k) {
        ClarificationEvent ev;
        ev.au_index = au;
        ev.backend = attempts[k].backend;
        ev.attempt = attempts[k].attempt;
        ev.generated = attempts[k].text;
        record.events.push_back(std::move(ev));
      }
      const auto& last = attempts.back();
      add_accepted(au, last.backend, last.attempt, last.text);
    }
  }
  std::stable_sort(record.events.begin(), record.events.end(), [](const auto& a, const auto& b) {
    return std::tie(a.au_index, a.attempt) < std::tie(b.au_index, b.attempt);
  });

  auto violations = validate_record(record, *c);
  out.violations.insert(out.violations.end(), violations.begin(), violations.end());
  if (!out.violations.empty()) return out;

  commit({{"type", event::kSubmitted},
          {"annotator", annotator},
          {"contribution_id", cid},
          {"record", record},
          {"resubmission", resubmission},
          {"ts", t}});
  out.accepted = true;
  out.record = std::move(record);
  return out;
}

AnnotationRecord AnnotationService::skip(const std::string& annotator, const std::string& cid, SkipReason reason) {
  std::unique_lock lock(mu_);
  require_tutorial(annotator);
  if (!find_contribution(cid)) throw Error(ErrorCode::kNotFound, "unknown contribution " + cid);
  const auto t = now();
  const Lease& lease = held_lease(annotator, cid, t);
  AnnotationRecord record;
  record.contribution_id = cid;
  record.annotator_id = annotator;
  record.phase = lease.phase;
  record.status = RecordStatus::kSkipped;
  record.skip_reason = reason;
  commit({{"type", event::kSkipped},
          {"annotator", annotator},
          {"contribution_id", cid},
          {"reason", to_string(reason)},
          {"record", record},
          {"ts", t}});
  return record;
}

std::vector<AnnotationRecord> AnnotationService::my_annotations(const std::string& annotator) const {
  std::shared_lock lock(mu_);
  std::vector<AnnotationRecord> out;
  for (const auto& [key, r] : state_.records) {
    if (key.second == annotator) out.push_back(r);
  }
  return out;
}

std::vector<AnnotationRecord> AnnotationService::records(const ExportFilter& f) const {
  std::shared_lock lock(mu_);
  std::vector<AnnotationRecord> out;
  if (f.campaign && *f.campaign != cfg_.name) return out;
  for (const auto& [key, r] : state_.records) {
    if (f.phase && r.phase != *f.phase) continue;
    if (f.annotator && r.annotator_id != *f.annotator) continue;
    out.push_back(r);
  }
  return out;
}

ExportData AnnotationService::export_dataset(const ExportFilter& f) {
  ExportData out;
  out.records = records(f);
  for (const auto& r : out.records) {
    for (auto& row : event_rows(r)) out.events.push_back(std::move(row));
  }
  std::unique_lock lock(mu_);
  Json filter = Json::object();
  if (f.campaign) filter["campaign"] = *f.campaign;
  if (f.phase) filter["phase"] = to_string(*f.phase);
  if (f.annotator) filter["annotator"] = *f.annotator;
  commit({{"type", event::kExported}, {"filter", filter}, {"records", out.records.size()}});
  return out;
}

ServiceState AnnotationService::state() const {
  std::shared_lock lock(mu_);
  return state_;
}

}  // namespace clarify::service
