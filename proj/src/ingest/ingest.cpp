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

#include "clarify/ingest/ingest.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>
#include <unordered_set>

#include "clarify/core/error.hpp"
#include "clarify/core/json_io.hpp"
#include "clarify/core/rng.hpp"
#include "clarify/core/utf8.hpp"
#include "clarify/ingest/sentences.hpp"

namespace clarify::ingest {
namespace {

std::string fold(std::string_view s) {
  auto u = utf8::to_lower(utf8::decode(utf8::trim(s)));
  std::u32string out;
  for (char32_t c : u) {
    if (c == U'_' || c == U'-' || c == U'’') c = U' ';
    if (utf8::is_space(c)) {
      if (!out.empty() && out.back() != U' ') out.push_back(U' ');
    } else {
      out.push_back(c);
    }
  }
  if (!out.empty() && out.back() == U' ') out.pop_back();
  return utf8::encode(out);
}

// Reads one CSV record; returns false at end of input.
bool next_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line,
                 const std::string& name) {
  fields.clear();
  int c = in.get();
  if (c == EOF) return false;
  ++line;
  const std::size_t start_line = line;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (;; c = in.get()) {
    if (quoted) {
      if (c == EOF) {
        throw Error(ErrorCode::kParse,
                    name + ":" + std::to_string(start_line) + ": unterminated quoted field");
      }
      if (c == '"') {
        if (in.peek() == '"') {
          in.get();
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(static_cast<char>(c));
      }
      continue;
    }
    if (c == EOF || c == '\n') {
      if (!field.empty() && field.back() == '\r' && !was_quoted) field.pop_back();
      fields.push_back(std::move(field));
      return true;
    }
    if (c == '\r' && in.peek() == '\n') continue;
    if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else if (c == '"') {
      if (!field.empty() || was_quoted) {
        throw Error(ErrorCode::kParse,
                    name + ":" + std::to_string(line) + ": stray quote inside a field");
      }
      quoted = true;
      was_quoted = true;
    } else {
      if (was_quoted) {
        throw Error(ErrorCode::kParse,
                    name + ":" + std::to_string(line) + ": text after closing quote");
      }
      field.push_back(static_cast<char>(c));
    }
  }
}

bool blank(const std::vector<std::string>& fields) {
  return fields.size() == 1 && utf8::trim(fields[0]).empty();
}

}  // namespace

Theme parse_theme_label(const std::string& label) {
  const std::string f = fold(label);
  for (Theme t : {Theme::kTaxation, Theme::kEcology, Theme::kStateOrganization, Theme::kDemocracy}) {
    if (f == fold(to_string(t)) || f == fold(theme_title(t, "en")) ||
        f == fold(theme_title(t, "fr"))) {
      return t;
    }
  }
  static const std::vector<std::pair<std::string, Theme>> kShort = {
      {"fiscalité", Theme::kTaxation},       {"fiscalite", Theme::kTaxation},
      {"taxes", Theme::kTaxation},           {"écologie", Theme::kEcology},
      {"ecologie", Theme::kEcology},         {"transition écologique", Theme::kEcology},
      {"ecology transition", Theme::kEcology}, {"organisation de l'état", Theme::kStateOrganization},
      {"organisation de l'etat", Theme::kStateOrganization}, {"state", Theme::kStateOrganization},
      {"démocratie", Theme::kDemocracy},     {"democratie", Theme::kDemocracy},
      {"démocratie et citoyenneté", Theme::kDemocracy}};
  for (const auto& [k, t] : kShort) {
    if (f == fold(k)) return t;
  }
  throw Error(ErrorCode::kParse, "unknown theme: " + label);
}

std::vector<RawContribution> read_csv(std::istream& in, const std::string& name) {
  std::vector<std::string> fields;
  std::size_t line = 0;
  if (!next_record(in, fields, line, name)) return {};
  std::optional<std::size_t> id_col, theme_col, text_col;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    auto h = fold(fields[i]);
    if (i == 0 && h.rfind("\xEF\xBB\xBF", 0) == 0) h = h.substr(3);
    if (h == "id") id_col = i;
    if (h == "theme") theme_col = i;
    if (h == "text") text_col = i;
  }
  if (!theme_col || !text_col) {
    throw Error(ErrorCode::kParse, name + ":1: header must name theme and text columns");
  }
  const std::size_t width = fields.size();
  std::vector<RawContribution> out;
  std::size_t row = 0;
  for (;;) {
    if (!next_record(in, fields, line, name)) break;
    if (blank(fields)) continue;
    if (fields.size() != width) {
      throw Error(ErrorCode::kParse, name + ":" + std::to_string(line) + ": expected " +
                                         std::to_string(width) + " fields, got " +
                                         std::to_string(fields.size()));
    }
    ++row;
    RawContribution r;
    r.id = id_col ? fields[*id_col] : "c" + std::to_string(row);
    r.theme = fields[*theme_col];
    r.text = fields[*text_col];
    r.line = line;
    out.push_back(std::move(r));
  }
  if (in.bad()) throw Error(ErrorCode::kIo, name + ": read failure after line " + std::to_string(line));
  return out;
}

std::vector<RawContribution> read_jsonl(std::istream& in, const std::string& name) {
  std::vector<RawContribution> out;
  std::size_t row = 0;
  for_each_json_line(in, name, [&](const Json& j, std::size_t line) {
    ++row;
    RawContribution r;
    r.id = j.contains("id") ? j.at("id").get<std::string>() : "c" + std::to_string(row);
    r.theme = j.at("theme").get<std::string>();
    r.text = j.at("text").get<std::string>();
    r.line = line;
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<RawContribution> read_raw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  if (path.extension() == ".csv") return read_csv(in, path.string());
  return read_jsonl(in, path.string());
}

void check_config(const IngestConfig& cfg) {
  if (!(cfg.min_chars > 0 && cfg.min_chars < cfg.max_chars)) {
    throw Error(ErrorCode::kInvalidArgument, "require 0 < min_chars < max_chars");
  }
  if (cfg.length_bins.empty()) throw Error(ErrorCode::kInvalidArgument, "no length bins");
  for (std::size_t i = 1; i < cfg.length_bins.size(); ++i) {
    if (cfg.length_bins[i] <= cfg.length_bins[i - 1]) {
      throw Error(ErrorCode::kInvalidArgument, "length bin edges must be strictly increasing");
    }
  }
}

std::size_t length_bin(std::size_t sentence_count, const std::vector<std::size_t>& edges) {
  auto it = std::upper_bound(edges.begin(), edges.end(), sentence_count);
  return it == edges.begin() ? 0 : static_cast<std::size_t>(it - edges.begin()) - 1;
}

PreparedCorpus prepare_corpus(const std::vector<RawContribution>& raw, const IngestConfig& cfg) {
  check_config(cfg);
  PreparedCorpus out;
  auto& s = out.summary;
  s.input = raw.size();
  s.length_histogram.assign(cfg.length_bins.size(), 0);
  std::unordered_set<std::string> seen_text;
  std::set<std::string> seen_id;
  for (const auto& r : raw) {
    const std::string where = r.line ? " (line " + std::to_string(r.line) + ")" : "";
    Theme theme;
    std::string text;
    try {
      theme = parse_theme_label(r.theme);
      text = utf8::trim(r.text);
    } catch (const Error& e) {
      throw Error(e.code(), std::string(e.what()) + where);
    }
    if (!seen_text.insert(text).second) {
      ++s.deduplicated;
      continue;
    }
    const std::size_t len = utf8::length(text);
    if (len < cfg.min_chars || len > cfg.max_chars) {
      ++s.filtered;
      ++(len < cfg.min_chars ? s.too_short : s.too_long);
      continue;
    }
    if (!seen_id.insert(r.id).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate contribution id " + r.id + where);
    }
    auto c = make_contribution(r.id, theme, std::move(text), 0);
    c.sentence_count = count_sentences(c.text);
    ++s.per_theme[theme];
    ++s.length_histogram[length_bin(c.sentence_count, cfg.length_bins)];
    out.contributions.push_back(std::move(c));
  }
  s.kept = out.contributions.size();
  std::sort(out.contributions.begin(), out.contributions.end(),
            [](const Contribution& a, const Contribution& b) { return a.id < b.id; });
  return out;
}

PreparedCorpus prepare_corpus(const std::vector<Contribution>& corpus, const IngestConfig& cfg) {
  std::vector<RawContribution> raw;
  raw.reserve(corpus.size());
  for (const auto& c : corpus) raw.push_back({c.id, std::string(to_string(c.theme)), c.text, 0});
  return prepare_corpus(raw, cfg);
}

SampleResult stratified_sample(const std::vector<Contribution>& corpus, const IngestConfig& cfg) {
  check_config(cfg);
  SampleResult out;
  Rng rng(derive_seed(cfg.seed, "stratified_sample"));
  if (!cfg.sample_size) {
    out.contributions = corpus;
    rng.shuffle(out.contributions);
    return out;
  }
  const std::size_t want = *cfg.sample_size;
  if (want > corpus.size()) {
    throw Error(ErrorCode::kInvalidArgument, "sample size " + std::to_string(want) +
                                                 " exceeds corpus size " +
                                                 std::to_string(corpus.size()));
  }

  // Cells in (theme, bin) order, members sorted by id, then shuffled.
  const std::size_t n_bins = cfg.length_bins.size();
  constexpr std::array<Theme, 4> kThemes = {Theme::kTaxation, Theme::kEcology,
                                            Theme::kStateOrganization, Theme::kDemocracy};
  std::vector<std::vector<const Contribution*>> cells(kThemes.size() * n_bins);
  for (const auto& c : corpus) {
    cells[static_cast<std::size_t>(c.theme) * n_bins + length_bin(c.sentence_count, cfg.length_bins)]
        .push_back(&c);
  }
  std::vector<std::size_t> live;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    auto& cell = cells[i];
    if (cell.empty()) {
      out.warnings.push_back("empty cell skipped: theme " +
                             std::string(to_string(kThemes[i / n_bins])) + ", bin " +
                             std::to_string(i % n_bins));
      continue;
    }
    std::sort(cell.begin(), cell.end(),
              [](const Contribution* a, const Contribution* b) { return a->id < b->id; });
    rng.shuffle(cell);
    live.push_back(i);
  }

  // Water filling: raise a common level until the quota is met; cells that
  // run out are taken whole.
  std::vector<std::size_t> quota(cells.size(), 0);
  std::size_t remaining = want;
  std::vector<std::size_t> open = live;
  while (remaining > 0 && !open.empty()) {
    const std::size_t level = remaining / open.size();
    std::vector<std::size_t> still_open;
    bool saturated = false;
    for (std::size_t i : open) {
      const std::size_t room = cells[i].size() - quota[i];
      if (room <= level) {
        quota[i] += room;
        remaining -= room;
        saturated = true;
      } else {
        still_open.push_back(i);
      }
    }
    if (saturated) {
      open = std::move(still_open);
      continue;
    }
    for (std::size_t i : open) quota[i] += level;
    remaining -= level * open.size();
    // Remainder: one extra item for a seeded choice of open cells.
    rng.shuffle(open);
    for (std::size_t j = 0; j < remaining; ++j) ++quota[open[j]];
    remaining = 0;
  }
  for (std::size_t i : live) {
    if (quota[i] == cells[i].size() && quota[i] < want / live.size()) {
      out.warnings.push_back("cell below the common level: theme " +
                             std::string(to_string(kThemes[i / n_bins])) + ", bin " +
                             std::to_string(i % n_bins) + " (" +
                             std::to_string(cells[i].size()) + " available)");
    }
    for (std::size_t j = 0; j < quota[i]; ++j) out.contributions.push_back(*cells[i][j]);
  }
  rng.shuffle(out.contributions);
  return out;
}

nlohmann::json to_json(const CorpusSummary& s, const std::vector<std::size_t>& edges) {
  nlohmann::json themes = nlohmann::json::object();
  for (const auto& [t, n] : s.per_theme) themes[to_string(t)] = n;
  nlohmann::json hist = nlohmann::json::array();
  for (std::size_t i = 0; i < s.length_histogram.size(); ++i) {
    std::string label = i + 1 < edges.size()
                            ? std::to_string(edges[i]) + "-" + std::to_string(edges[i + 1] - 1)
                            : ">=" + std::to_string(edges[i]);
    hist.push_back({{"sentences", label}, {"count", s.length_histogram[i]}});
  }
  return {{"input", s.input},         {"kept", s.kept},           {"deduplicated", s.deduplicated},
          {"filtered", s.filtered},   {"too_short", s.too_short}, {"too_long", s.too_long},
          {"per_theme", themes},      {"length_histogram", hist}};
}

}  // namespace clarify::ingest
