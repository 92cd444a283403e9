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

#include <string>
#include <vector>

#include "clarify/core/types.hpp"

namespace clarify {

struct Violation {
  std::string rule;     // e.g. "segment_containment"
  std::string element;  // e.g. "units[1].segments[0]"
  std::string message;

  bool operator==(const Violation&) const = default;
};

// Checks every structural invariant of a record against its contribution.
// Throws Error(kInvalidArgument) if the ids differ.
std::vector<Violation> validate_record(const AnnotationRecord& record,
                                       const Contribution& contribution);

}  // namespace clarify
