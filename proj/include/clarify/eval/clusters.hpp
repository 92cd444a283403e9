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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "clarify/core/json_io.hpp"
#include "clarify/core/types.hpp"

namespace clarify::eval {

// HDBSCAN-style label for unclustered texts.
inline constexpr const char* kNoiseCluster = "-1";

struct ClusterItem {
  std::string text_id;
  std::string cluster;  // opaque
  Theme theme = Theme::kTaxation;
  std::string text;
  // Text shown to the judge instead of this one, looked up by id (used when
  // clusters were built on clarifications but units are compared).
  std::optional<std::string> surface_text_id;

  bool operator==(const ClusterItem&) const = default;
};

struct ClusterAssignment {
  std::vector<ClusterItem> items;  // text ids unique

  const ClusterItem* find(const std::string& text_id) const;
};

// JSON lines {"text_id", "cluster", "theme", "text"[, "surface_text_id"]}.
// Cluster ids may be strings or integers. Throws Error(kParse) with the line
// on malformed input and on a repeated text id.
ClusterAssignment read_assignment(std::istream& in, const std::string& name);
ClusterAssignment read_assignment(const std::filesystem::path& path);

struct TextPair {
  std::string cluster;
  std::string first;   // text ids, first < second
  std::string second;

  bool operator==(const TextPair&) const = default;
};

struct PairSample {
  std::map<Theme, std::vector<TextPair>> pairs;
  std::map<Theme, std::size_t> shortfall;  // requested minus returned, when positive
  std::size_t warnings = 0;                // themes with a shortfall
};

// Per theme: n distinct unordered within-cluster pairs, each qualifying pair
// equally likely (clusters weighted by their pair count). The noise cluster
// is excluded. Deterministic in seed.
PairSample sample_pairs(const ClusterAssignment& assignment, std::size_t n_per_theme, std::uint64_t seed);

// Number of unordered pairs available per theme.
std::map<Theme, std::uint64_t> pair_counts(const ClusterAssignment& assignment);

}  // namespace clarify::eval
