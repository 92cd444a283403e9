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

#include "clarify/eval/significance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "clarify/core/error.hpp"

namespace clarify::eval {
namespace {

constexpr int kMaxIter = 1000;
constexpr double kEps = 1e-16;

// Lower series: P(a, x) = x^a e^-x / Gamma(a + 1) * sum x^n / ((a+1)...(a+n)).
double gamma_p_series(double a, double x) {
  double term = 1.0 / a, sum = term;
  for (int n = 1; n < kMaxIter; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper continued fraction, modified Lentz.
double gamma_q_fraction(double a, double x) {
  const double tiny = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double binomial_log_pmf(std::size_t i, std::size_t n) {
  return std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) - static_cast<double>(n) * std::log(2.0);
}

}  // namespace

double gamma_q(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "gamma_q needs a > 0 and x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_fraction(a, x);
}

double chi2_survival(double x, double df) {
  if (!(df > 0.0)) throw Error(ErrorCode::kInvalidArgument, "df must be positive");
  if (x <= 0.0) return 1.0;
  return gamma_q(df / 2.0, x / 2.0);
}

double binomial_test(std::size_t k, std::size_t n, Alternative alt) {
  if (n == 0 || k > n) throw Error(ErrorCode::kInvalidArgument, "binomial test needs 0 <= k <= n, n > 0");
  std::vector<double> pmf(n + 1);
  for (std::size_t i = 0; i <= n; ++i) pmf[i] = std::exp(binomial_log_pmf(i, n));
  double p = 0.0;
  switch (alt) {
    case Alternative::kGreater:
      for (std::size_t i = k; i <= n; ++i) p += pmf[i];
      break;
    case Alternative::kLess:
      for (std::size_t i = 0; i <= k; ++i) p += pmf[i];
      break;
    case Alternative::kTwoSided: {
      // Relative slack so outcomes tied with k in exact arithmetic count.
      const double bound = pmf[k] * (1.0 + 1e-7);
      for (std::size_t i = 0; i <= n; ++i) {
        if (pmf[i] <= bound) p += pmf[i];
      }
      break;
    }
  }
  return std::min(1.0, p);
}

SignificanceResult significance_tests(const std::array<std::size_t, 3>& counts, Alternative alt) {
  const std::size_t total = counts[0] + counts[1] + counts[2];
  if (total == 0) throw Error(ErrorCode::kInvalidArgument, "significance tests need at least one judged item");
  SignificanceResult r;
  const double expected = static_cast<double>(total) / 3.0;
  for (auto c : counts) {
    const double d = static_cast<double>(c) - expected;
    r.chi_square.statistic += d * d / expected;
  }
  r.chi_square.df = 2;
  r.chi_square.p = chi2_survival(r.chi_square.statistic, 2.0);
  r.binomial.k = counts[0];
  r.binomial.n = counts[0] + counts[1];
  r.binomial.alternative = alt;
  if (r.binomial.n > 0) r.binomial.p = binomial_test(r.binomial.k, r.binomial.n, alt);
  return r;
}

const char* to_string(Alternative a) {
  switch (a) {
    case Alternative::kTwoSided:
      return "two-sided";
    case Alternative::kGreater:
      return "greater";
    case Alternative::kLess:
      return "less";
  }
  return "";
}

Alternative parse_alternative(std::string_view s) {
  if (s == "two-sided") return Alternative::kTwoSided;
  if (s == "greater") return Alternative::kGreater;
  if (s == "less") return Alternative::kLess;
  throw Error(ErrorCode::kParse, "unknown alternative: " + std::string(s));
}

Json to_json(const SignificanceResult& r) {
  return Json{{"chi_square", {{"statistic", r.chi_square.statistic}, {"df", r.chi_square.df}, {"p", r.chi_square.p}}},
              {"binomial",
               {{"k", r.binomial.k},
                {"n", r.binomial.n},
                {"p", r.binomial.p ? Json(*r.binomial.p) : Json(nullptr)},
                {"alternative", to_string(r.binomial.alternative)}}}};
}

}  // namespace clarify::eval
