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

#include "clarify/core/validate.hpp"

#include <algorithm>
#include <map>

#include "clarify/core/error.hpp"

namespace clarify {
namespace {

std::string span_str(const CharSpan& s) {
  return "[" + std::to_string(s.start) + "," + std::to_string(s.end) + ")";
}

std::string unit_path(std::size_t i) { return "units[" + std::to_string(i) + "]"; }

// Merges sorted spans that touch or overlap into maximal intervals.
std::vector<CharSpan> merged(std::vector<CharSpan> spans) {
  std::sort(spans.begin(), spans.end());
  std::vector<CharSpan> out;
  for (const auto& s : spans) {
    if (!out.empty() && s.start <= out.back().end) {
      out.back().end = std::max(out.back().end, s.end);
    } else {
      out.push_back(s);
    }
  }
  return out;
}

class Checker {
 public:
  Checker(const AnnotationRecord& r, const Contribution& c) : rec_(r), len_(c.char_length) {}

  std::vector<Violation> run() {
    check_status();
    for (std::size_t i = 0; i < rec_.units.size(); ++i) check_unit(i);
    check_unit_overlap();
    check_events();
    return std::move(out_);
  }

 private:
  void add(std::string rule, std::string element, std::string message) {
    out_.push_back({std::move(rule), std::move(element), std::move(message)});
  }

  bool check_bounds(const CharSpan& s, const std::string& where) {
    if (s.start < s.end && s.end <= len_) return true;
    add("span_bounds", where,
        "span " + span_str(s) + " must satisfy 0 <= start < end <= " + std::to_string(len_));
    return false;
  }

  void check_status() {
    if (rec_.status == RecordStatus::kCompleted) {
      if (rec_.units.empty()) add("completed_has_units", "units", "completed record has no units");
      if (rec_.skip_reason) add("skip_reason_only_when_skipped", "skip_reason",
                                "completed record carries a skip reason");
    } else {
      if (!rec_.units.empty()) add("skipped_has_no_units", "units", "skipped record has units");
      if (!rec_.skip_reason) add("skipped_has_reason", "skip_reason", "skipped record lacks a reason");
    }
  }

  void check_unit(std::size_t i) {
    const auto& unit = rec_.units[i];
    const auto base = unit_path(i);
    if (unit.spans.empty()) add("unit_has_spans", base, "unit has no spans");
    bool spans_ok = true;
    for (std::size_t j = 0; j < unit.spans.size(); ++j) {
      const auto where = base + ".spans[" + std::to_string(j) + "]";
      spans_ok &= check_bounds(unit.spans[j], where);
      if (j > 0 && unit.spans[j].start < unit.spans[j - 1].end) {
        add("unit_spans_sorted_disjoint", where,
            "span " + span_str(unit.spans[j]) + " starts before the previous span ends");
      }
    }
    if (unit.segments.empty()) add("unit_has_segment", base, "unit has no segment");
    const auto hull = merged(unit.spans);
    for (std::size_t j = 0; j < unit.segments.size(); ++j) {
      const auto where = base + ".segments[" + std::to_string(j) + "]";
      const auto& seg = unit.segments[j].span;
      if (!check_bounds(seg, where)) continue;
      const bool inside = std::any_of(hull.begin(), hull.end(),
                                      [&](const CharSpan& h) { return h.contains(seg); });
      if (spans_ok && !inside) {
        add("segment_containment", where,
            "segment " + span_str(seg) + " is not contained in the unit's spans");
      }
      for (std::size_t m = 0; m < j; ++m) {
        if (seg.overlaps(unit.segments[m].span)) {
          add("segment_overlap", where,
              "segment " + span_str(seg) + " overlaps segments[" + std::to_string(m) + "]");
        }
      }
    }
  }

  void check_unit_overlap() {
    for (std::size_t a = 0; a < rec_.units.size(); ++a) {
      for (std::size_t b = a + 1; b < rec_.units.size(); ++b) {
        bool hit = false;
        for (const auto& sa : rec_.units[a].spans) {
          for (const auto& sb : rec_.units[b].spans) hit |= sa.overlaps(sb);
        }
        if (hit) {
          add("unit_overlap", unit_path(b), "unit overlaps " + unit_path(a));
        }
      }
    }
  }

  void check_events() {
    std::map<std::size_t, std::vector<const ClarificationEvent*>> by_unit;
    for (std::size_t i = 0; i < rec_.events.size(); ++i) {
      const auto& ev = rec_.events[i];
      const auto where = "events[" + std::to_string(i) + "]";
      if (ev.au_index >= rec_.units.size()) {
        add("event_unit_exists", where, "au_index " + std::to_string(ev.au_index) + " out of range");
        continue;
      }
      if (ev.accepted != ev.observed_quality.has_value()) {
        add("event_quality_iff_accepted", where,
            "observed_quality must be present exactly when accepted");
      }
      if (ev.observed_quality && (*ev.observed_quality < 0.0 || *ev.observed_quality > 1.0)) {
        add("event_quality_range", where, "observed_quality outside [0,1]");
      }
      by_unit[ev.au_index].push_back(&ev);
    }
    for (auto& [au, evs] : by_unit) {
      std::sort(evs.begin(), evs.end(),
                [](auto* x, auto* y) { return x->attempt < y->attempt; });
      const auto where = unit_path(au);
      bool seq_ok = true;
      for (std::size_t i = 0; i < evs.size(); ++i) seq_ok &= evs[i]->attempt == i + 1;
      if (!seq_ok) {
        add("event_attempts_contiguous", where, "attempt indices must form 1..K");
        continue;
      }
      for (std::size_t i = 0; i < evs.size(); ++i) {
        const bool last = i + 1 == evs.size();
        if (evs[i]->accepted != last) {
          add("event_last_accepted", where, "exactly the last attempt must be accepted");
          break;
        }
      }
      if (rec_.phase == Phase::kPhase2 && evs.size() != 1) {
        add("event_phase2_single_attempt", where, "phase 2 allows a single attempt");
      }
    }
  }

  const AnnotationRecord& rec_;
  std::size_t len_;
  std::vector<Violation> out_;
};

}  // namespace

std::vector<Violation> validate_record(const AnnotationRecord& record,
                                       const Contribution& contribution) {
  if (record.contribution_id != contribution.id) {
    throw Error(ErrorCode::kInvalidArgument,
                "record for '" + record.contribution_id + "' checked against contribution '" +
                    contribution.id + "'");
  }
  return Checker(record, contribution).run();
}

}  // namespace clarify
