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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "clarify/quality/model.hpp"

namespace clarify::quality {

// Builds a dataset from exported clarification-event lines. Backends are
// indexed in lexicographic order of their names. When phase is set, lines
// whose "phase" differs are skipped.
QualityDataset dataset_from_events(const std::vector<nlohmann::json>& events,
                                   const std::optional<std::string>& phase);

QualityDataset read_event_file(const std::filesystem::path& path,
                               const std::optional<std::string>& phase);

}  // namespace clarify::quality
