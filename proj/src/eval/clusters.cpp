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

#include "clarify/eval/clusters.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_map>

#include "clarify/core/error.hpp"
#include "clarify/core/rng.hpp"

namespace clarify::eval {

const ClusterItem* ClusterAssignment::find(const std::string& text_id) const {
  for (const auto& item : items) {
    if (item.text_id == text_id) return &item;
  }
  return nullptr;
}

ClusterAssignment read_assignment(std::istream& in, const std::string& name) {
  ClusterAssignment out;
  std::set<std::string> ids;
  for_each_json_line(in, name, [&](const Json& j, std::size_t line) {
    auto fail = [&](const std::string& m) {
      throw Error(ErrorCode::kParse, name + ":" + std::to_string(line) + ": " + m);
    };
    ClusterItem item;
    try {
      item.text_id = j.at("text_id").get<std::string>();
      const auto& cluster = j.at("cluster");
      item.cluster = cluster.is_string() ? cluster.get<std::string>() : cluster.dump();
      item.theme = parse_theme(j.at("theme").get<std::string>());
      item.text = j.at("text").get<std::string>();
      if (j.contains("surface_text_id") && !j.at("surface_text_id").is_null()) {
        item.surface_text_id = j.at("surface_text_id").get<std::string>();
      }
    } catch (const nlohmann::json::exception& e) {
      fail(e.what());
    } catch (const Error& e) {
      fail(e.what());
    }
    if (!ids.insert(item.text_id).second) fail("duplicate text_id " + item.text_id);
    out.items.push_back(std::move(item));
  });
  return out;
}

ClusterAssignment read_assignment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return read_assignment(in, path.string());
}

namespace {

// Qualifying clusters of one theme, members sorted by text id.
using Clusters = std::vector<std::pair<std::string, std::vector<std::string>>>;

std::map<Theme, Clusters> group(const ClusterAssignment& a) {
  std::map<Theme, std::map<std::string, std::vector<std::string>>> by;
  for (const auto& item : a.items) {
    if (item.cluster == kNoiseCluster) continue;
    by[item.theme][item.cluster].push_back(item.text_id);
  }
  std::map<Theme, Clusters> out;
  for (auto& [theme, clusters] : by) {
    for (auto& [id, members] : clusters) {
      if (members.size() < 2) continue;
      std::sort(members.begin(), members.end());
      out[theme].emplace_back(id, std::move(members));
    }
  }
  return out;
}

std::uint64_t pairs_of(std::size_t m) { return static_cast<std::uint64_t>(m) * (m - 1) / 2; }

// Pair number k of a cluster with m members, in row-major (i < j) order.
std::pair<std::size_t, std::size_t> unrank_pair(std::uint64_t k, std::size_t m) {
  std::size_t i = 0;
  while (k >= m - 1 - i) {
    k -= m - 1 - i;
    ++i;
  }
  return {i, i + 1 + static_cast<std::size_t>(k)};
}

}  // namespace

std::map<Theme, std::uint64_t> pair_counts(const ClusterAssignment& assignment) {
  std::map<Theme, std::uint64_t> out;
  for (Theme t : kAllThemes) out[t] = 0;
  for (const auto& [theme, clusters] : group(assignment)) {
    for (const auto& c : clusters) out[theme] += pairs_of(c.second.size());
  }
  return out;
}

PairSample sample_pairs(const ClusterAssignment& assignment, std::size_t n_per_theme, std::uint64_t seed) {
  PairSample out;
  const auto grouped = group(assignment);
  for (Theme theme : kAllThemes) {
    auto& pairs = out.pairs[theme];
    const auto it = grouped.find(theme);
    std::vector<std::uint64_t> cumulative;
    std::uint64_t total = 0;
    if (it != grouped.end()) {
      for (const auto& c : it->second) cumulative.push_back(total += pairs_of(c.second.size()));
    }
    const std::uint64_t want = std::min<std::uint64_t>(n_per_theme, total);
    if (want < n_per_theme) {
      out.shortfall[theme] = n_per_theme - static_cast<std::size_t>(want);
      ++out.warnings;
    }
    if (want == 0) continue;

    // Floyd's algorithm: want distinct ranks from [0, total).
    Rng rng(derive_seed(seed, to_string(theme)));
    std::set<std::uint64_t> chosen;
    std::vector<std::uint64_t> order;
    for (std::uint64_t j = total - want; j < total; ++j) {
      const std::uint64_t t = rng.uniform_index(j + 1);
      const std::uint64_t pick = chosen.count(t) ? j : t;
      chosen.insert(pick);
      order.push_back(pick);
    }
    rng.shuffle(order);
    for (std::uint64_t rank : order) {
      const auto c = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), rank) -
                                              cumulative.begin());
      const std::uint64_t base = c == 0 ? 0 : cumulative[c - 1];
      const auto& [cluster, members] = it->second[c];
      const auto [i, j] = unrank_pair(rank - base, members.size());
      pairs.push_back({cluster, members[i], members[j]});
    }
  }
  return out;
}

}  // namespace clarify::eval
