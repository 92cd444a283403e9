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

#include "clarify/service/state.hpp"

#include <unistd.h>

#include <fstream>
#include <sstream>

#include "clarify/core/error.hpp"

namespace clarify::service {

namespace fs = std::filesystem;

std::optional<std::string> ServiceState::lease_of(const std::string& annotator) const {
  for (const auto& [cid, lease] : leases) {
    if (lease.annotator == annotator) return cid;
  }
  return std::nullopt;
}

namespace {

[[noreturn]] void corrupt(const std::string& m) { throw Error(ErrorCode::kCorruption, m); }

Json attempt_json(const GeneratedAttempt& a) {
  return Json{{"attempt", a.attempt}, {"backend", a.backend}, {"text", a.text}};
}

GeneratedAttempt attempt_from(const Json& j) {
  return {j.at("attempt").get<std::size_t>(), j.at("backend").get<std::string>(), j.at("text").get<std::string>()};
}

}  // namespace

Json to_json(const ServiceState& s) {
  Json accounts = Json::object();
  for (const auto& [id, a] : s.accounts) {
    accounts[id] = {{"tutorial_passed", a.tutorial_passed}, {"completed", a.completed}};
  }
  Json leases = Json::object();
  for (const auto& [cid, l] : s.leases) {
    leases[cid] = {{"annotator", l.annotator},
                   {"phase", to_string(l.phase)},
                   {"expires_ms", l.expires_ms},
                   {"seq", l.seq}};
  }
  Json records = Json::array();
  for (const auto& [key, r] : s.records) records.push_back(r);
  Json drafts = Json::array();
  for (const auto& [key, d] : s.drafts) {
    Json units = Json::object();
    for (const auto& [au, attempts] : d) {
      Json list = Json::array();
      for (const auto& a : attempts) list.push_back(attempt_json(a));
      units[std::to_string(au)] = list;
    }
    drafts.push_back({{"contribution_id", key.first}, {"annotator", key.second}, {"units", units}});
  }
  return Json{{"last_seq", s.last_seq},   {"last_ts", s.last_ts},         {"accounts", accounts},
              {"leases", leases},         {"records", records},           {"drafts", drafts},
              {"done", s.done},           {"assignments", s.assignments}, {"exports", s.exports}};
}

ServiceState state_from_json(const Json& j) {
  ServiceState s;
  try {
    s.last_seq = j.at("last_seq").get<std::uint64_t>();
    s.last_ts = j.at("last_ts").get<std::int64_t>();
    for (const auto& [id, a] : j.at("accounts").items()) {
      s.accounts[id] = {a.at("tutorial_passed").get<std::size_t>(), a.at("completed").get<std::size_t>()};
    }
    for (const auto& [cid, l] : j.at("leases").items()) {
      s.leases[cid] = {l.at("annotator").get<std::string>(), parse_phase(l.at("phase").get<std::string>()),
                       l.at("expires_ms").get<std::int64_t>(), l.at("seq").get<std::uint64_t>()};
    }
    for (const auto& r : j.at("records")) {
      auto rec = r.get<AnnotationRecord>();
      s.records[{rec.contribution_id, rec.annotator_id}] = std::move(rec);
    }
    for (const auto& d : j.at("drafts")) {
      Draft draft;
      for (const auto& [au, list] : d.at("units").items()) {
        auto& attempts = draft[std::stoul(au)];
        for (const auto& a : list) attempts.push_back(attempt_from(a));
      }
      s.drafts[{d.at("contribution_id").get<std::string>(), d.at("annotator").get<std::string>()}] = std::move(draft);
    }
    s.done = j.at("done").get<std::map<std::string, std::size_t>>();
    s.assignments = j.at("assignments").get<std::size_t>();
    s.exports = j.at("exports").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    corrupt(std::string("bad state document: ") + e.what());
  }
  return s;
}

void apply(ServiceState& s, const Json& ev) {
  try {
    const auto seq = ev.at("seq").get<std::uint64_t>();
    if (seq != s.last_seq + 1) {
      corrupt("journal sequence " + std::to_string(seq) + " after " + std::to_string(s.last_seq));
    }
    const auto type = ev.at("type").get<std::string>();
    auto annotator = [&] { return ev.at("annotator").get<std::string>(); };
    auto cid = [&] { return ev.at("contribution_id").get<std::string>(); };

    if (type == event::kTutorialSubmitted) {
      auto& acc = s.accounts[annotator()];
      if (ev.at("passed").get<bool>()) ++acc.tutorial_passed;
    } else if (type == event::kAssigned) {
      const auto id = cid();
      if (s.leases.count(id)) corrupt("contribution " + id + " assigned while leased");
      s.leases[id] = {annotator(), parse_phase(ev.at("phase").get<std::string>()),
                      ev.at("expires_ms").get<std::int64_t>(), seq};
      s.accounts[annotator()];
      ++s.assignments;
    } else if (type == event::kRegenerated) {
      s.drafts[{cid(), annotator()}][ev.at("au_index").get<std::size_t>()].push_back(
          {ev.at("attempt").get<std::size_t>(), ev.at("backend").get<std::string>(), ev.at("text").get<std::string>()});
    } else if (type == event::kSubmitted || type == event::kSkipped) {
      const auto id = cid();
      const auto who = annotator();
      auto record = ev.at("record").get<AnnotationRecord>();
      if (record.contribution_id != id || record.annotator_id != who) corrupt("record does not match its event");
      s.records[{id, who}] = std::move(record);
      if (!ev.value("resubmission", false)) {
        s.leases.erase(id);
        ++s.accounts[who].completed;
        ++s.done[id];
      }
      s.drafts.erase({id, who});
    } else if (type == event::kLeaseExpired) {
      s.leases.erase(cid());
    } else if (type == event::kExported) {
      ++s.exports;
    } else {
      corrupt("unknown journal event type " + type);
    }
    s.last_seq = seq;
    s.last_ts = ev.at("ts").get<std::int64_t>();
  } catch (const nlohmann::json::exception& e) {
    corrupt(std::string("malformed journal event: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kCorruption) throw;
    corrupt(std::string("malformed journal event: ") + e.what());
  }
}

std::vector<Json> read_journal(const fs::path& path, bool truncate_torn_tail) {
  std::vector<Json> out;
  if (!fs::exists(path)) return out;
  const std::string content = read_file(path);
  std::size_t pos = 0, line = 0, good_end = 0;
  while (pos < content.size()) {
    ++line;
    const auto nl = content.find('\n', pos);
    const bool last = nl == std::string::npos || content.find_first_not_of(" \t\r\n", nl) == std::string::npos;
    const std::string text = content.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    Json j;
    bool ok = nl != std::string::npos;
    if (ok && !text.empty()) {
      try {
        j = Json::parse(text);
      } catch (const nlohmann::json::exception&) {
        ok = false;
      }
    }
    if (!ok) {
      if (!last) corrupt(path.string() + ":" + std::to_string(line) + ": damaged journal line");
      break;  // torn tail
    }
    if (!text.empty()) out.push_back(std::move(j));
    pos = nl + 1;
    good_end = pos;
  }
  if (truncate_torn_tail && good_end < content.size()) fs::resize_file(path, good_end);
  return out;
}

Journal::Journal(fs::path path, bool sync) : path_(std::move(path)), sync_(sync) {
  if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
  existing_ = read_journal(path_, true);
  file_ = std::fopen(path_.c_str(), "ab");
  if (!file_) throw Error(ErrorCode::kIo, "cannot open journal " + path_.string());
}

Journal::~Journal() {
  if (file_) std::fclose(file_);
}

void Journal::append(const Json& event) {
  const std::string line = event.dump() + "\n";
  if (std::fwrite(line.data(), 1, line.size(), file_) != line.size() || std::fflush(file_) != 0) {
    throw Error(ErrorCode::kIo, "journal write failed: " + path_.string());
  }
  if (sync_) ::fsync(::fileno(file_));
}

ServiceState replay(const std::vector<Json>& events, std::optional<ServiceState> snapshot) {
  ServiceState s = snapshot ? std::move(*snapshot) : ServiceState{};
  for (const auto& ev : events) {
    if (ev.at("seq").get<std::uint64_t>() <= s.last_seq) continue;
    apply(s, ev);
  }
  return s;
}

void write_snapshot(const fs::path& path, const ServiceState& s) {
  write_file_atomic(path, to_json(s).dump() + "\n");
}

std::optional<ServiceState> read_snapshot(const fs::path& path) {
  if (!fs::exists(path)) return std::nullopt;
  try {
    return state_from_json(Json::parse(read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    corrupt(path.string() + ": " + e.what());
  }
}

}  // namespace clarify::service
