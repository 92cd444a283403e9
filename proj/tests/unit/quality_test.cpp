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

#include <cmath>
#include <random>

#include <boost/math/special_functions/beta.hpp>

#include "../oracles/quality_oracles.hpp"
#include "clarify/core/error.hpp"
#include "clarify/quality/events.hpp"
#include "clarify/quality/incomplete_beta.hpp"
#include "clarify/quality/model.hpp"

using namespace clarify;
using namespace clarify::quality;

TEST_CASE("reg_inc_beta closed forms") {
  CHECK(reg_inc_beta(0.3, 1, 1) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(reg_inc_beta(0.5, 2, 2) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(reg_inc_beta(0.5, 2, 1) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(reg_inc_beta(0.0, 3, 4) == 0.0);
  CHECK(reg_inc_beta(1.0, 3, 4) == 1.0);
  CHECK_THROWS_AS(reg_inc_beta(-0.1, 1, 1), Error);
  CHECK_THROWS_AS(reg_inc_beta(1.1, 1, 1), Error);
  CHECK_THROWS_AS(reg_inc_beta(0.5, 0, 1), Error);
  CHECK_THROWS_AS(reg_inc_beta(0.5, 1, -2), Error);
}

TEST_CASE("reg_inc_beta matches Boost ibeta") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> ux(0.0, 1.0), ulog(-3.0, 3.5);
  for (int i = 0; i < 5000; ++i) {
    double a = std::exp(ulog(gen)), b = std::exp(ulog(gen)), x = ux(gen);
    double ref = boost::math::ibeta(a, b, x);
    CHECK(std::abs(reg_inc_beta(x, a, b) - ref) <= 1e-10);
  }
}

TEST_CASE("reg_inc_beta properties") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> ux(0.0, 1.0), ulog(-2.5, 3.0);
  for (int i = 0; i < 2000; ++i) {
    double a = std::exp(ulog(gen)), b = std::exp(ulog(gen)), x = ux(gen);
    CHECK(std::abs(reg_inc_beta(x, a, b) - (1.0 - reg_inc_beta(1.0 - x, b, a))) <= 1e-8);
  }
  for (double a : {0.1, 0.5, 1.0, 3.0, 40.0}) {
    double prev = 0.0;
    for (int i = 0; i <= 200; ++i) {
      double v = reg_inc_beta(i / 200.0, a, 1.7);
      CHECK(v >= prev - 1e-15);
      prev = v;
    }
  }
}

TEST_CASE("quadrature agrees with the continued fraction for moderate shapes") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> ux(0.0, 1.0), us(0.3, 8.0);
  for (int i = 0; i < 500; ++i) {
    double a = us(gen), b = us(gen), x = ux(gen);
    CHECK(std::abs(reg_inc_beta_quadrature(x, a, b) - reg_inc_beta(x, a, b)) <= 1e-7);
  }
}

TEST_CASE("beta_mean on reported parameters") {
  CHECK(beta_mean({1.75, 0.112}) == doctest::Approx(0.9399).epsilon(1e-4));
  CHECK(beta_mean({1.80, 0.122}) == doctest::Approx(0.9365).epsilon(1e-4));
  CHECK(beta_mean({1.57, 0.119}) == doctest::Approx(0.9295).epsilon(1e-4));
  CHECK(beta_mean({1.10, 0.116}) == doctest::Approx(0.9046).epsilon(1e-4));
  CHECK(beta_mean({1, 1}) == 0.5);
}

TEST_CASE("log_likelihood examples") {
  QualityDataset empty{{"m"}, {}};
  CHECK(log_likelihood(empty, {{1, 1}}, {0.5}, LikelihoodForm::kPaperProduct) == 0.0);

  QualityDataset one_acc{{"m"}, {{1, 0, true, 0.7}}};
  CHECK(log_likelihood(one_acc, {{1, 1}}, {1e-6}, LikelihoodForm::kPaperProduct) ==
        doctest::Approx(0.0).epsilon(1e-5));

  QualityDataset one_rej{{"m"}, {{1, 0, false, std::nullopt}}};
  CHECK(log_likelihood(one_rej, {{1, 1}}, {0.5}, LikelihoodForm::kPaperProduct) ==
        doctest::Approx(std::log(0.5)).epsilon(1e-12));
  CHECK(log_likelihood(one_rej, {{1, 1}}, {0.5}, LikelihoodForm::kStandardCensored) ==
        doctest::Approx(std::log(0.5)).epsilon(1e-12));

  // Censored form: an accepted quality below its threshold is impossible.
  QualityDataset low{{"m"}, {{1, 0, true, 0.3}}};
  CHECK(std::isinf(log_likelihood(low, {{1, 1}}, {0.5}, LikelihoodForm::kStandardCensored)));
}

TEST_CASE("log_likelihood validates input and counts clamps") {
  QualityDataset bad{{"m"}, {{1, 1, false, std::nullopt}}};
  CHECK_THROWS_AS(log_likelihood(bad, {{1, 1}}, {0.5}, LikelihoodForm::kPaperProduct), Error);
  QualityDataset k0{{"m"}, {{0, 0, false, std::nullopt}}};
  CHECK_THROWS_AS(log_likelihood(k0, {{1, 1}}, {0.5}, LikelihoodForm::kPaperProduct), Error);
  QualityDataset mismatch{{"m"}, {{1, 0, true, std::nullopt}}};
  CHECK_THROWS_AS(log_likelihood(mismatch, {{1, 1}}, {0.5}, LikelihoodForm::kPaperProduct), Error);
  QualityDataset ok{{"m"}, {{1, 0, true, 0.5}}};
  CHECK_THROWS_AS(log_likelihood(ok, {{0, 1}}, {0.5}, LikelihoodForm::kPaperProduct), Error);
  CHECK_THROWS_AS(log_likelihood(ok, {{1, 1}}, {1.0}, LikelihoodForm::kPaperProduct), Error);

  QualityDataset edges{{"m"}, {{1, 0, true, 1.0}, {1, 0, true, 0.0}, {1, 0, true, 0.4}}};
  CHECK(count_clamped(edges) == 2);
  CHECK(std::isfinite(log_likelihood(edges, {{2, 3}}, {0.1}, LikelihoodForm::kPaperProduct)));
}

TEST_CASE("log_likelihood matches the per-observation oracle") {
  auto data = oracle::simulate_threshold_process({{5, 1}, {2, 3}, {0.7, 0.4}}, {0.6, 0.5, 0.4}, 300, 9);
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> us(0.3, 6.0), ut(0.05, 0.95);
  for (int i = 0; i < 50; ++i) {
    std::vector<BetaParams> p{{us(gen), us(gen)}, {us(gen), us(gen)}, {us(gen), us(gen)}};
    std::vector<double> tau{ut(gen), ut(gen)};
    double ours = log_likelihood(data, p, tau, LikelihoodForm::kPaperProduct);
    double ref = oracle::quality_log_likelihood(data, p, tau, true);
    CHECK(ours == doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("duplicating every observation doubles the log-likelihood") {
  auto data = oracle::simulate_threshold_process({{3, 1}, {2, 2}}, {0.6, 0.5, 0.4}, 500, 17);
  auto twice = data;
  twice.observations.insert(twice.observations.end(), data.observations.begin(),
                            data.observations.end());
  std::vector<BetaParams> p{{2.5, 0.9}, {1.7, 2.2}};
  for (auto form : {LikelihoodForm::kPaperProduct, LikelihoodForm::kStandardCensored}) {
    std::vector<double> tau{0.2, 0.2, 0.1};
    double single = log_likelihood(data, p, tau, form);
    double doubled = log_likelihood(twice, p, tau, form);
    CHECK(doubled == doctest::Approx(2.0 * single).epsilon(1e-12));
  }
}

TEST_CASE("log_likelihood peaks near the empirical acceptance boundary") {
  // Single attempt, threshold 0.6: the rejection rate fixes where the
  // threshold belongs given the true parameters.
  BetaParams truth{3, 2};
  auto data = oracle::simulate_threshold_process({truth}, {0.6}, 4000, 23);
  double rej = 0;
  for (const auto& o : data.observations) rej += o.accepted ? 0 : 1;
  double boundary = boost::math::ibeta_inv(truth.alpha, truth.beta, rej / data.observations.size());
  for (auto form : {LikelihoodForm::kPaperProduct, LikelihoodForm::kStandardCensored}) {
    double at = log_likelihood(data, {truth}, {boundary - 1e-3}, form);
    CHECK(log_likelihood(data, {truth}, {boundary - 0.15}, form) < at);
    CHECK(log_likelihood(data, {truth}, {boundary + 0.15}, form) < at);
  }
}

TEST_CASE("fit_mle with zero iterations returns the initial point") {
  auto data = oracle::simulate_threshold_process({{3, 1}}, {0.6, 0.5}, 200, 2);
  FitConfig cfg;
  cfg.max_iters = 0;
  auto r = fit_mle(data, cfg, LikelihoodForm::kPaperProduct);
  CHECK(r.backends[0].params.alpha == 1.0);
  CHECK(r.backends[0].params.beta == 1.0);
  CHECK(r.thresholds == ThresholdVector{0.5, 0.5});
  CHECK(r.log_likelihood == doctest::Approx(log_likelihood(data, {{1, 1}}, {0.5, 0.5},
                                                           LikelihoodForm::kPaperProduct)));
  CHECK(r.trace.size() == 1);
}

TEST_CASE("fit_mle trace is non-decreasing and more iterations never hurt") {
  auto data = oracle::simulate_threshold_process({{4, 1.5}, {2, 2}}, {0.6, 0.5, 0.4}, 600, 31);
  for (auto form : {LikelihoodForm::kPaperProduct, LikelihoodForm::kStandardCensored}) {
    FitConfig cfg;
    cfg.max_iters = 150;
    auto a = fit_mle(data, cfg, form);
    for (std::size_t i = 1; i < a.trace.size(); ++i) CHECK(a.trace[i] >= a.trace[i - 1] - 1e-10);
    cfg.max_iters = 300;
    auto b = fit_mle(data, cfg, form);
    CHECK(b.log_likelihood >= a.log_likelihood - 1e-10);
    auto again = fit_mle(data, cfg, form);
    CHECK(again.log_likelihood == b.log_likelihood);
    CHECK(again.trace == b.trace);
  }
}

TEST_CASE("fit_mle flags backends without accepted attempts") {
  QualityDataset data{{"good", "silent"},
                      {{1, 0, true, 0.8}, {1, 0, true, 0.9}, {1, 0, false, std::nullopt},
                       {2, 0, true, 0.7}, {1, 1, false, std::nullopt}}};
  FitConfig cfg;
  cfg.max_iters = 50;
  auto r = fit_mle(data, cfg, LikelihoodForm::kPaperProduct);
  CHECK(r.backends[0].fitted);
  CHECK_FALSE(r.backends[1].fitted);
  CHECK(r.backends[1].observations == 1);
  auto j = to_json(r);
  CHECK(j["backends"][1]["fitted"] == false);
}

TEST_CASE("all-accepted fit with a vanishing threshold matches the uncensored grid MLE") {
  std::mt19937_64 gen(41);
  std::gamma_distribution<double> ga(2.5, 1.0), gb(1.5, 1.0);
  QualityDataset data{{"m"}, {}};
  std::vector<double> xs;
  for (int i = 0; i < 1500; ++i) {
    double x = ga(gen), y = gb(gen);
    double e = std::clamp(x / (x + y), 1e-6, 1.0 - 1e-6);
    xs.push_back(e);
    data.observations.push_back({1, 0, true, e});
  }
  auto ref = oracle::beta_mle_grid(xs);
  FitConfig cfg;
  cfg.fixed_thresholds = ThresholdVector{1e-6};
  cfg.max_iters = 5000;
  auto r = fit_mle(data, cfg, LikelihoodForm::kPaperProduct);
  CHECK(std::abs(r.backends[0].mean - beta_mean(ref)) <= 1e-2);
  CHECK(r.backends[0].params.alpha == doctest::Approx(ref.alpha).epsilon(0.05));
}

TEST_CASE("censored fit recovers synthetic means") {
  std::vector<BetaParams> truth{{5, 1}, {4, 2}};
  auto data = oracle::simulate_threshold_process(truth, {0.6, 0.5, 0.4}, 2000, 77);
  FitConfig cfg;
  auto r = fit_mle(data, cfg, LikelihoodForm::kStandardCensored);
  for (std::size_t l = 0; l < truth.size(); ++l) {
    CHECK(std::abs(r.backends[l].mean - beta_mean(truth[l])) <= 0.02);
  }
}

TEST_CASE("dataset_from_events indexes backends and filters phases") {
  std::vector<nlohmann::json> events{
      {{"backend", "zeta"}, {"attempt", 1}, {"accepted", false}, {"phase", "phase1"}},
      {{"backend", "alpha"}, {"attempt", 2}, {"accepted", true}, {"observed_quality", 0.8},
       {"phase", "phase1"}},
      {{"backend", "mid"}, {"attempt", 1}, {"accepted", true}, {"observed_quality", 0.5},
       {"phase", "phase2"}}};
  auto all = dataset_from_events(events, std::nullopt);
  CHECK(all.backends == std::vector<std::string>{"alpha", "mid", "zeta"});
  CHECK(all.observations.size() == 3);
  CHECK(all.observations[0].backend == 2);
  auto p1 = dataset_from_events(events, std::string("phase1"));
  CHECK(p1.backends.size() == 2);
  events.push_back({{"attempt", 1}});
  CHECK_THROWS_AS(dataset_from_events(events, std::nullopt), Error);
}
