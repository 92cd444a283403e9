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

// Reference implementations used only by tests. Each one follows the textbook
// definition directly and shares no code with the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <set>
#include <string>
#include <vector>

namespace clarify::oracle {

// WindowDiff evaluated window by window from the definition.
inline double window_diff(const std::vector<std::size_t>& ref, const std::vector<std::size_t>& hyp,
                          std::size_t n, std::size_t k) {
  const std::set<std::size_t> r(ref.begin(), ref.end());
  const std::set<std::size_t> h(hyp.begin(), hyp.end());
  std::size_t bad = 0;
  for (std::size_t i = 0; i + k < n; ++i) {
    std::size_t cr = 0, ch = 0;
    for (std::size_t b = i + 1; b <= i + k; ++b) {
      cr += r.count(b);
      ch += h.count(b);
    }
    bad += cr != ch;
  }
  return static_cast<double>(bad) / static_cast<double>(n - k);
}

// Best total over every one-to-one assignment of a zero-padded square matrix.
inline double best_assignment_total(const std::vector<std::vector<double>>& m) {
  const std::size_t rows = m.size();
  const std::size_t cols = rows ? m[0].size() : 0;
  const std::size_t n = std::max(rows, cols);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = 0.0;
  do {
    double s = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      if (perm[r] < cols) s += m[r][perm[r]];
    }
    best = std::max(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Full (|a|+1) x (|b|+1) edit-distance table.
inline std::size_t levenshtein(const std::u32string& a, const std::u32string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
  }
  return d[a.size()][b.size()];
}

// Longest common subsequence by enumerating every subsequence of the shorter
// sequence (exponential; keep inputs small).
inline std::size_t lcs_brute_force(std::vector<std::string> a, std::vector<std::string> b) {
  if (a.size() > b.size()) std::swap(a, b);
  std::size_t best = 0;
  const std::size_t n = a.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    const auto bits = static_cast<std::size_t>(__builtin_popcountll(mask));
    if (bits <= best) continue;
    std::size_t j = 0;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      if (!(mask >> i & 1)) continue;
      while (j < b.size() && b[j] != a[i]) ++j;
      if (j == b.size()) ok = false;
      else ++j;
    }
    if (ok) best = bits;
  }
  return best;
}

// Two-sided exact binomial p-value by enumerating all outcomes.
inline double binomial_two_sided(std::size_t k, std::size_t n) {
  std::vector<double> pmf(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    pmf[i] = std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) -
                      static_cast<double>(n) * std::log(2.0));
  }
  double p = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    if (pmf[i] <= pmf[k] * (1 + 1e-7)) p += pmf[i];
  }
  return std::min(1.0, p);
}

// Chi-square survival for even df by the finite Poisson sum.
inline double chi2_survival_even_df(double x, unsigned df) {
  const double h = x / 2.0;
  double term = 1.0, sum = 1.0;
  for (unsigned j = 1; j < df / 2; ++j) {
    term *= h / j;
    sum += term;
  }
  return std::exp(-h) * sum;
}

}  // namespace clarify::oracle
