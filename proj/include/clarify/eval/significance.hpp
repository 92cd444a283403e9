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

#pragma once

#include <array>
#include <cstddef>
#include <optional>

#include "clarify/core/json_io.hpp"

namespace clarify::eval {

// Regularized upper incomplete gamma Q(a, x), a > 0, x >= 0.
double gamma_q(double a, double x);

// Chi-square survival function P(X > x) with df degrees of freedom.
double chi2_survival(double x, double df);

enum class Alternative { kTwoSided, kGreater, kLess };

// Exact binomial test of k successes in n trials against p = 0.5. The
// two-sided p sums the probabilities of all outcomes no more likely than k.
double binomial_test(std::size_t k, std::size_t n, Alternative alt = Alternative::kTwoSided);

struct ChiSquareResult {
  double statistic = 0.0;
  unsigned df = 2;
  double p = 1.0;
};

struct BinomialResult {
  std::size_t k = 0;  // A wins
  std::size_t n = 0;  // A + B, draws excluded
  std::optional<double> p;  // empty when n = 0
  Alternative alternative = Alternative::kTwoSided;
};

struct SignificanceResult {
  ChiSquareResult chi_square;
  BinomialResult binomial;
};

// counts = {A, B, TIE}. Chi-square goodness of fit against uniform thirds
// and a binomial test of A against B. Throws Error(kInvalidArgument) when
// all counts are zero.
SignificanceResult significance_tests(const std::array<std::size_t, 3>& counts,
                                      Alternative alt = Alternative::kTwoSided);

const char* to_string(Alternative a);
Alternative parse_alternative(std::string_view s);
Json to_json(const SignificanceResult& r);

}  // namespace clarify::eval
