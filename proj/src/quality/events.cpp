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

#include "clarify/quality/events.hpp"

#include <map>

#include "clarify/core/error.hpp"
#include "clarify/core/json_io.hpp"

namespace clarify::quality {
namespace {

QualityDataset build(const std::vector<nlohmann::json>& events,
                     const std::optional<std::string>& phase) {
  std::vector<const nlohmann::json*> kept;
  std::map<std::string, std::size_t> index;
  for (const auto& e : events) {
    if (phase && e.value("phase", std::string{}) != *phase) continue;
    kept.push_back(&e);
    index.emplace(e.at("backend").get<std::string>(), 0);
  }
  QualityDataset data;
  for (auto& [name, i] : index) {
    i = data.backends.size();
    data.backends.push_back(name);
  }
  for (const auto* e : kept) {
    QualityObservation o;
    o.backend = index.at(e->at("backend").get<std::string>());
    o.attempt = e->at("attempt").get<std::size_t>();
    o.accepted = e->at("accepted").get<bool>();
    if (auto it = e->find("observed_quality"); it != e->end() && !it->is_null()) {
      o.quality = it->get<double>();
    }
    data.observations.push_back(o);
  }
  return data;
}

}  // namespace

QualityDataset dataset_from_events(const std::vector<nlohmann::json>& events,
                                   const std::optional<std::string>& phase) {
  QualityDataset data;
  try {
    data = build(events, phase);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("clarification event: ") + e.what());
  }
  check_dataset(data);
  return data;
}

QualityDataset read_event_file(const std::filesystem::path& path,
                               const std::optional<std::string>& phase) {
  std::vector<nlohmann::json> events;
  for_each_json_line(path, [&](const Json& j, std::size_t) { events.push_back(j); });
  return dataset_from_events(events, phase);
}

}  // namespace clarify::quality
