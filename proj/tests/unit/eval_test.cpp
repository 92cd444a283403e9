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

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "../oracles/oracles.hpp"
#include "clarify/core/error.hpp"
#include "clarify/eval/clusters.hpp"
#include "clarify/eval/judge.hpp"
#include "clarify/eval/significance.hpp"

using namespace clarify;
using namespace clarify::eval;

namespace {

ClusterAssignment assignment(const std::vector<std::tuple<std::string, std::string, Theme>>& rows) {
  ClusterAssignment a;
  for (const auto& [id, cluster, theme] : rows) a.items.push_back({id, cluster, theme, "text " + id, std::nullopt});
  return a;
}

std::shared_ptr<llm::ChatBackend> judge(std::function<std::string(const llm::Messages&)> fn) {
  llm::BackendConfig c;
  c.name = "judge";
  c.kind = "mock";
  return std::make_shared<llm::FunctionBackend>(c, std::move(fn));
}

std::vector<JudgeItem> items(std::size_t n) {
  std::vector<JudgeItem> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({kAllThemes[i % 4], {"a" + std::to_string(i), "a'"}, {"b" + std::to_string(i), "b'"}});
  }
  return out;
}

}  // namespace

TEST_CASE("upper incomplete gamma agrees with Boost") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> ua(0.05, 60.0), ux(0.0, 120.0);
  for (int i = 0; i < 5000; ++i) {
    const double a = ua(gen), x = ux(gen);
    const double ref = boost::math::gamma_q(a, x);
    CHECK(gamma_q(a, x) == doctest::Approx(ref).epsilon(1e-10));
    CHECK(std::abs(gamma_q(a, x) - ref) <= 1e-12);
  }
  CHECK(gamma_q(3.0, 0.0) == 1.0);
  CHECK_THROWS_AS(gamma_q(0.0, 1.0), Error);
}

TEST_CASE("chi-square survival: df=2 closed form and even-df sums") {
  for (int i = 0; i <= 4000; ++i) {
    const double x = i * 0.025;
    CHECK(std::abs(chi2_survival(x, 2) - std::exp(-x / 2)) <= 1e-10);
    for (unsigned df : {4u, 6u, 10u}) {
      CHECK(std::abs(chi2_survival(x, df) - oracle::chi2_survival_even_df(x, df)) <= 1e-10);
    }
  }
  CHECK(chi2_survival(2.0, 2) == doctest::Approx(0.36787944117144233));
}

TEST_CASE("binomial test agrees with enumeration") {
  std::mt19937_64 gen(5);
  for (int i = 0; i < 400; ++i) {
    const std::size_t n = 1 + gen() % 300;
    const std::size_t k = gen() % (n + 1);
    CHECK(binomial_test(k, n) == doctest::Approx(oracle::binomial_two_sided(k, n)).epsilon(1e-9));
    double greater = 0.0;
    for (std::size_t j = k; j <= n; ++j) greater += std::exp(std::lgamma(n + 1.0) - std::lgamma(j + 1.0) -
                                                             std::lgamma(n - j + 1.0) - n * std::log(2.0));
    CHECK(binomial_test(k, n, Alternative::kGreater) == doctest::Approx(std::min(1.0, greater)).epsilon(1e-9));
  }
  for (std::size_t n = 1; n <= 40; ++n) {
    CHECK(binomial_test(n, n) == doctest::Approx(std::min(1.0, 2 * std::pow(0.5, n))).epsilon(1e-12));
  }
  CHECK(binomial_test(5, 10) == doctest::Approx(1.0));
  CHECK_THROWS_AS(binomial_test(0, 0), Error);
}

TEST_CASE("significance examples") {
  auto r = significance_tests({7, 7, 7});
  CHECK(r.chi_square.statistic == 0.0);
  CHECK(r.chi_square.p == 1.0);
  CHECK(r.chi_square.df == 2);

  r = significance_tests({54, 336, 10});
  CHECK(r.chi_square.p < 1e-6);
  REQUIRE(r.binomial.p);
  CHECK(*r.binomial.p < 1e-6);
  CHECK(r.binomial.k == 54);
  CHECK(r.binomial.n == 390);

  r = significance_tests({0, 0, 4});
  CHECK_FALSE(r.binomial.p);
  CHECK(r.chi_square.p > 0.0);
  CHECK_THROWS_AS(significance_tests({0, 0, 0}), Error);
  CHECK(to_json(r)["binomial"]["p"].is_null());
}

TEST_CASE("chi-square p stays in (0, 1] and the statistic is non-negative") {
  std::mt19937_64 gen(9);
  for (int i = 0; i < 500; ++i) {
    const Counts c{gen() % 200, gen() % 200, gen() % 200 + 1};
    const auto r = significance_tests(c);
    CHECK(r.chi_square.statistic >= 0.0);
    CHECK(r.chi_square.p > 0.0);
    CHECK(r.chi_square.p <= 1.0);
  }
}

TEST_CASE("assignment reader") {
  std::istringstream in(
      "{\"text_id\":\"t1\",\"cluster\":3,\"theme\":\"ecology\",\"text\":\"a\"}\n"
      "{\"text_id\":\"t2\",\"cluster\":\"-1\",\"theme\":\"ecology\",\"text\":\"b\",\"surface_text_id\":\"u2\"}\n");
  const auto a = read_assignment(in, "x.jsonl");
  REQUIRE(a.items.size() == 2);
  CHECK(a.items[0].cluster == "3");
  CHECK(a.items[1].surface_text_id == "u2");
  std::istringstream dup(
      "{\"text_id\":\"t1\",\"cluster\":1,\"theme\":\"ecology\",\"text\":\"a\"}\n"
      "{\"text_id\":\"t1\",\"cluster\":1,\"theme\":\"ecology\",\"text\":\"a\"}\n");
  try {
    read_assignment(dup, "dup.jsonl");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kParse);
    CHECK(std::string(e.what()).find("dup.jsonl:2") != std::string::npos);
  }
}

TEST_CASE("pair sampling examples") {
  auto singles = assignment({{"a", "1", Theme::kTaxation}, {"b", "2", Theme::kTaxation}});
  auto s = sample_pairs(singles, 5, 1);
  CHECK(s.pairs[Theme::kTaxation].empty());
  CHECK(s.warnings == 4);
  CHECK(s.shortfall[Theme::kTaxation] == 5);

  auto two = assignment({{"b", "c", Theme::kEcology}, {"a", "c", Theme::kEcology}});
  s = sample_pairs(two, 1, 99);
  REQUIRE(s.pairs[Theme::kEcology].size() == 1);
  CHECK(s.pairs[Theme::kEcology][0] == TextPair{"c", "a", "b"});
}

TEST_CASE("pair sampling properties") {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 50; ++trial) {
    ClusterAssignment a;
    std::map<std::string, std::string> cluster_of;
    for (int i = 0; i < 80; ++i) {
      const std::string id = "t" + std::to_string(i);
      const std::string cluster = gen() % 5 == 0 ? kNoiseCluster : std::to_string(gen() % 8);
      a.items.push_back({id, cluster, kAllThemes[gen() % 4], "x", std::nullopt});
      cluster_of[id] = cluster;
    }
    const auto available = pair_counts(a);
    const auto s1 = sample_pairs(a, 30, trial);
    const auto s2 = sample_pairs(a, 30, trial);
    CHECK(s1.pairs == s2.pairs);
    for (const auto& [theme, pairs] : s1.pairs) {
      CHECK(pairs.size() == std::min<std::uint64_t>(30, available.at(theme)));
      std::set<std::pair<std::string, std::string>> seen;
      for (const auto& p : pairs) {
        CHECK(p.first < p.second);
        CHECK(cluster_of[p.first] == p.cluster);
        CHECK(cluster_of[p.second] == p.cluster);
        CHECK(p.cluster != kNoiseCluster);
        CHECK(seen.insert({p.first, p.second}).second);
      }
    }
  }
}

TEST_CASE("every qualifying pair is equally likely") {
  // Clusters of size 2 and 3: four pairs, each should get a quarter.
  auto a = assignment({{"p", "x", Theme::kDemocracy},
                       {"q", "x", Theme::kDemocracy},
                       {"r", "y", Theme::kDemocracy},
                       {"s", "y", Theme::kDemocracy},
                       {"t", "y", Theme::kDemocracy}});
  std::map<std::string, int> freq;
  const int draws = 8000;
  for (int seed = 0; seed < draws; ++seed) {
    const auto& p = sample_pairs(a, 1, seed).pairs[Theme::kDemocracy].at(0);
    ++freq[p.first + p.second];
  }
  REQUIRE(freq.size() == 4);
  double chi = 0.0;
  for (const auto& [k, f] : freq) chi += std::pow(f - draws / 4.0, 2) / (draws / 4.0);
  CHECK(chi2_survival(chi, 3) > 1e-3);
}

TEST_CASE("judge tallies and verdict parsing") {
  auto always_a = judge([](const llm::Messages&) { return "A"; });
  JudgeOptions fixed;
  fixed.randomize_sides = false;
  auto r = judge_pairs(items(10), *always_a, fixed);
  CHECK(r.tally.total == Counts{10, 0, 0});

  auto b_ws = judge([](const llm::Messages&) { return "B\n"; });
  r = judge_pairs(items(3), *b_ws, fixed);
  CHECK(r.tally.total == Counts{0, 3, 0});

  auto equality = judge([](const llm::Messages&) { return "EQUALITY"; });
  r = judge_pairs(items(2), *equality);
  CHECK(r.tally.total == Counts{0, 0, 2});
  CHECK(r.tally.flagged == 0);
}

TEST_CASE("randomized sides are undone before tallying") {
  // Prefers whichever slot shows the texts of clustering B.
  auto symmetric = judge([](const llm::Messages& m) {
    const auto& user = m.back().content;
    const auto a_pos = user.find("- b");
    const auto split = user.find("\nB");
    return a_pos < split ? std::string("A") : std::string("B");
  });
  JudgeOptions opts;
  opts.seed = 17;
  const auto r = judge_pairs(items(40), *symmetric, opts);
  CHECK(r.tally.total == Counts{0, 40, 0});
  std::size_t swapped = 0;
  for (const auto& o : r.outcomes) swapped += o.swapped;
  CHECK(swapped > 5);
  CHECK(swapped < 35);
  std::size_t themed = 0;
  for (const auto& [t, c] : r.tally.per_theme) themed += c[0] + c[1] + c[2];
  CHECK(themed == 40);
}

TEST_CASE("unparseable verdicts and backend failures") {
  int calls = 0;
  auto babble = judge([&](const llm::Messages&) {
    ++calls;
    return "Les deux groupes se valent peut-être.";
  });
  auto r = judge_pairs(items(1), *babble);
  CHECK(calls == 2);
  CHECK(r.tally.total == Counts{0, 0, 1});
  CHECK(r.tally.flagged == 1);
  CHECK(r.outcomes[0].flagged);

  auto second_try = judge([n = 0](const llm::Messages&) mutable { return n++ == 0 ? "hmm" : "A"; });
  JudgeOptions fixed;
  fixed.randomize_sides = false;
  r = judge_pairs(items(1), *second_try, fixed);
  CHECK(r.tally.total == Counts{1, 0, 0});
  CHECK(r.tally.flagged == 0);

  auto down = judge([](const llm::Messages&) -> std::string { throw Error(ErrorCode::kBackend, "unavailable"); });
  r = judge_pairs(items(3), *down);
  CHECK(r.tally.unjudged == 3);
  CHECK(r.tally.total == Counts{0, 0, 0});
  const auto report = evaluation_report(r);
  CHECK(report["tests"]["total"].is_null());
}

TEST_CASE("parallel judging matches sequential judging") {
  auto fn = judge([](const llm::Messages& m) {
    const auto h = std::hash<std::string>{}(m.back().content);
    return std::string(h % 3 == 0 ? "A" : h % 3 == 1 ? "B" : "TIE");
  });
  JudgeOptions seq, par;
  seq.seed = par.seed = 4;
  par.max_parallel = 4;
  const auto a = judge_pairs(items(60), *fn, seq);
  const auto b = judge_pairs(items(60), *fn, par);
  CHECK(to_json(a.tally) == to_json(b.tally));
  for (std::size_t i = 0; i < 60; ++i) CHECK(a.outcomes[i].verdict == b.outcomes[i].verdict);
}

TEST_CASE("judge items follow surface text ids") {
  ClusterAssignment a, b;
  a.items = {{"u1", "1", Theme::kTaxation, "unit one", std::nullopt},
             {"u2", "1", Theme::kTaxation, "unit two", std::nullopt}};
  b.items = {{"c1", "9", Theme::kTaxation, "clar one", std::string("u1")},
             {"c2", "9", Theme::kTaxation, "clar two", std::string("u2")}};
  const auto sa = sample_pairs(a, 1, 0);
  const auto sb = sample_pairs(b, 1, 0);
  const auto its = build_judge_items(a, sa, b, sb);
  REQUIRE(its.size() == 1);
  CHECK(its[0].texts_a == std::vector<std::string>{"unit one", "unit two"});
  CHECK(its[0].texts_b == std::vector<std::string>{"unit one", "unit two"});
  b.items[0].surface_text_id = "missing";
  CHECK_THROWS_AS(build_judge_items(a, sa, b, sb), Error);
}
