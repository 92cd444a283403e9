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

#include <doctest.h>

#include <map>
#include <random>
#include <set>
#include <sstream>

#include "clarify/core/error.hpp"
#include "clarify/core/utf8.hpp"
#include "clarify/ingest/ingest.hpp"
#include "clarify/ingest/sentences.hpp"

using namespace clarify;
using namespace clarify::ingest;

namespace {

std::string filler(std::size_t n, char c = 'x') { return std::string(n, c); }

std::vector<Contribution> grid_corpus(std::size_t per_cell, std::uint64_t seed) {
  // Every theme with sentence counts 1..6, per_cell texts each.
  std::vector<Contribution> out;
  std::mt19937_64 gen(seed);
  int n = 0;
  for (Theme t : {Theme::kTaxation, Theme::kEcology, Theme::kStateOrganization, Theme::kDemocracy}) {
    for (std::size_t s = 1; s <= 6; ++s) {
      for (std::size_t i = 0; i < per_cell + gen() % 3; ++i) {
        std::string text;
        for (std::size_t k = 0; k < s; ++k) text += "Phrase numero " + std::to_string(n) + ". ";
        auto c = make_contribution("id" + std::to_string(n++), t, utf8::trim(text), 0);
        c.sentence_count = count_sentences(c.text);
        out.push_back(c);
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("sentence counting") {
  CHECK(count_sentences("Bonjour. Merci! Vraiment?") == 3);
  CHECK(count_sentences("") == 0);
  CHECK(count_sentences("   ") == 0);
  CHECK(count_sentences("Pas de ponctuation finale") == 1);
  CHECK(count_sentences("Quoi ?! Non... Si…") == 3);
  CHECK(count_sentences("M. Dupont est venu. Il est parti.") == 2);
  CHECK(count_sentences("Voir cf. l'article 3. Merci.") == 2);
  CHECK(count_sentences("Il a dit « Stop. » Puis il est parti.") == 2);
  CHECK(count_sentences("Le taux de 5.5 est trop haut") == 1);
  CHECK(count_sentences("Baisser la TVA ! Augmenter l'ISF !") == 2);
  auto spans = split_sentences("  Un. Deux.  ");
  REQUIRE(spans.size() == 2);
  CHECK(spans[0] == CharSpan{2, 5});
  CHECK(spans[1] == CharSpan{6, 11});
}

TEST_CASE("theme labels") {
  CHECK(parse_theme_label("taxation") == Theme::kTaxation);
  CHECK(parse_theme_label("La transition écologique") == Theme::kEcology);
  CHECK(parse_theme_label("  DÉMOCRATIE ") == Theme::kDemocracy);
  CHECK(parse_theme_label("state_organization") == Theme::kStateOrganization);
  CHECK(parse_theme_label("L'organisation de l'État et des services publics") ==
        Theme::kStateOrganization);
  CHECK_THROWS_AS(parse_theme_label("sport"), Error);
}

TEST_CASE("csv reader") {
  std::istringstream in(
      "id,theme,text\r\n"
      "a1,taxation,\"Moins d'impôts, plus de services.\"\r\n"
      "\n"
      "a2,ecology,\"Il a dit \"\"non\"\"\nsur deux lignes\"\n"
      "a3,democracy,simple\n");
  auto rows = read_csv(in, "t.csv");
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].text == "Moins d'impôts, plus de services.");
  CHECK(rows[1].text == "Il a dit \"non\"\nsur deux lignes");
  CHECK(rows[2].id == "a3");
  CHECK(rows[2].line == 6);

  std::istringstream no_id("theme,text\ntaxation,hello\n");
  CHECK(read_csv(no_id, "x")[0].id == "c1");

  std::istringstream ragged("id,theme,text\na,taxation\n");
  try {
    read_csv(ragged, "r.csv");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kParse);
    CHECK(std::string(e.what()).find("r.csv:2") != std::string::npos);
  }
  std::istringstream open_quote("id,theme,text\na,taxation,\"oops\n");
  CHECK_THROWS_AS(read_csv(open_quote, "q"), Error);
  std::istringstream no_header("foo,bar\n");
  CHECK_THROWS_AS(read_csv(no_header, "h"), Error);
}

TEST_CASE("jsonl reader reports the line") {
  std::istringstream in("{\"id\":\"x\",\"theme\":\"ecology\",\"text\":\"t\"}\n{bad\n");
  try {
    read_jsonl(in, "in.jsonl");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("in.jsonl:2") != std::string::npos);
  }
}

TEST_CASE("prepare_corpus filters, deduplicates and counts") {
  std::vector<RawContribution> raw{
      {"b", "taxation", "  " + filler(40) + " ", 1},
      {"a", "ecology", "Trop court.", 2},
      {"c", "taxation", filler(40), 3},
      {"d", "democracy", filler(601), 4},
      {"e", "democracy", "Bonjour. Merci! Vraiment? " + filler(30), 5},
      {"f", "democracy", filler(30), 6},
      {"g", "democracy", filler(600), 7},
  };
  auto out = prepare_corpus(raw, IngestConfig{});
  const auto& s = out.summary;
  CHECK(s.input == 7);
  CHECK(s.deduplicated == 1);
  CHECK(s.filtered == 2);
  CHECK(s.too_short == 1);
  CHECK(s.too_long == 1);
  CHECK(s.kept == 4);
  CHECK(s.input == s.kept + s.deduplicated + s.filtered);
  REQUIRE(out.contributions.size() == 4);
  CHECK(out.contributions[0].id == "b");
  CHECK(out.contributions[0].text == filler(40));
  CHECK(out.contributions[1].id == "e");
  CHECK(out.contributions[1].sentence_count == 4);
  CHECK(s.per_theme.at(Theme::kDemocracy) == 3);

  auto again = prepare_corpus(out.contributions, IngestConfig{});
  CHECK(again.contributions == out.contributions);
  CHECK(again.summary.deduplicated == 0);
  CHECK(again.summary.filtered == 0);

  std::vector<RawContribution> dup_id{{"x", "taxation", filler(40), 1}, {"x", "taxation", filler(50), 2}};
  CHECK_THROWS_AS(prepare_corpus(dup_id, IngestConfig{}), Error);
  std::vector<RawContribution> bad_theme{{"x", "cuisine", filler(40), 9}};
  CHECK_THROWS_WITH_AS(prepare_corpus(bad_theme, IngestConfig{}), doctest::Contains("line 9"), Error);
}

TEST_CASE("config validation and bins") {
  IngestConfig cfg;
  cfg.min_chars = 600;
  CHECK_THROWS_AS(check_config(cfg), Error);
  cfg = IngestConfig{};
  cfg.length_bins = {1, 3, 3};
  CHECK_THROWS_AS(check_config(cfg), Error);
  std::vector<std::size_t> edges{1, 2, 3, 4, 5};
  CHECK(length_bin(0, edges) == 0);
  CHECK(length_bin(1, edges) == 0);
  CHECK(length_bin(4, edges) == 3);
  CHECK(length_bin(9, edges) == 4);
}

TEST_CASE("stratified sample examples") {
  std::vector<Contribution> corpus;
  int n = 0;
  for (Theme t : {Theme::kTaxation, Theme::kEcology, Theme::kStateOrganization, Theme::kDemocracy}) {
    for (std::size_t s : {1, 2}) {
      auto c = make_contribution("k" + std::to_string(n++), t, "x", 0);
      c.sentence_count = s;
      corpus.push_back(c);
    }
  }
  IngestConfig cfg;
  cfg.length_bins = {1, 2};
  cfg.sample_size = 8;
  auto out = stratified_sample(corpus, cfg);
  CHECK(out.contributions.size() == 8);
  std::set<std::pair<Theme, std::size_t>> cells;
  for (const auto& c : out.contributions) cells.insert({c.theme, c.sentence_count});
  CHECK(cells.size() == 8);

  cfg.sample_size = 0;
  CHECK(stratified_sample(corpus, cfg).contributions.empty());
  cfg.sample_size = 9;
  CHECK_THROWS_AS(stratified_sample(corpus, cfg), Error);
  cfg.sample_size.reset();
  auto shuffled = stratified_sample(corpus, cfg).contributions;
  CHECK(shuffled.size() == corpus.size());
  CHECK(std::is_permutation(shuffled.begin(), shuffled.end(), corpus.begin()));
}

TEST_CASE("stratified sample properties") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto corpus = grid_corpus(2 + seed % 7, seed);
    IngestConfig cfg;
    cfg.seed = seed;
    cfg.sample_size = (seed * 37) % corpus.size();
    auto a = stratified_sample(corpus, cfg);
    auto b = stratified_sample(corpus, cfg);
    CHECK(a.contributions == b.contributions);
    CHECK(a.contributions.size() == *cfg.sample_size);

    std::set<std::string> ids;
    std::set<std::string> corpus_ids;
    for (const auto& c : corpus) corpus_ids.insert(c.id);
    std::map<std::pair<Theme, std::size_t>, std::size_t> per_cell, available;
    for (const auto& c : corpus) ++available[{c.theme, length_bin(c.sentence_count, cfg.length_bins)}];
    for (const auto& c : a.contributions) {
      CHECK(ids.insert(c.id).second);
      CHECK(corpus_ids.count(c.id) == 1);
      ++per_cell[{c.theme, length_bin(c.sentence_count, cfg.length_bins)}];
    }
    // Cells that were not exhausted differ by at most one; no exhausted cell
    // got more than one above them.
    std::size_t lo = SIZE_MAX, hi = 0, exhausted_max = 0;
    for (const auto& [cell, cap] : available) {
      std::size_t got = per_cell.count(cell) ? per_cell[cell] : 0;
      if (got == cap) {
        exhausted_max = std::max(exhausted_max, got);
      } else {
        lo = std::min(lo, got);
        hi = std::max(hi, got);
      }
    }
    if (lo != SIZE_MAX) {
      CHECK(hi - lo <= 1);
      CHECK(exhausted_max <= lo + 1);
    }
  }
}

TEST_CASE("empty cells are reported") {
  std::vector<Contribution> corpus;
  for (int i = 0; i < 6; ++i) {
    auto c = make_contribution("t" + std::to_string(i), Theme::kTaxation, "x", 0);
    c.sentence_count = 1;
    corpus.push_back(c);
  }
  IngestConfig cfg;
  cfg.sample_size = 3;
  auto out = stratified_sample(corpus, cfg);
  CHECK(out.contributions.size() == 3);
  CHECK(out.warnings.size() == 19);
}
