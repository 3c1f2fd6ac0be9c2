// Copyright 2026 The scengen Authors.
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

// Turns a generated template into a search-ready logical scenario: fills
// every parameter range (model proposals when they are safe, conservative
// defaults otherwise) and hands the most passive vehicle to the ADS.

#ifndef SCENGEN_LOGICALIZE_HPP_
#define SCENGEN_LOGICALIZE_HPP_

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scengen/dsl.hpp"
#include "scengen/ips.hpp"
#include "scengen/llm.hpp"

namespace scengen {

/// Default parameter ranges keyed by (statement kind, parameter). Lane-valued
/// parameters may be marked road-derived, meaning {1..lane_count}.
///
/// JSON schema:
///   {"npc":         {"lane": "road", "offset": [0,80], "speed": [0,20]},
///    "accelerate":  {"speed": [0,25], "trigger": [1,4]},
///    "decelerate":  {"speed": [0,25], "trigger": [1,4]},
///    "lane_change": {"lane": "road", "speed": [0,25], "trigger": [1,4]}}
class DefaultRangeTable {
 public:
  struct Entry {
    Range range;
    bool road_lanes = false;
  };

  /// Shipped implementer defaults; tunable through a config file.
  static DefaultRangeTable builtin();
  /// Throws ConfigError on malformed JSON or physically impossible ranges.
  static DefaultRangeTable from_json(const std::string& text);
  static DefaultRangeTable load(const std::string& path);
  std::string to_json() const;

  void set(StatementKind kind, ParamKind param, Entry entry) { entries_[{kind, param}] = entry; }
  void erase(StatementKind kind, ParamKind param) { entries_.erase({kind, param}); }
  /// Throws MissingDefault when the table has no entry.
  Range lookup(StatementKind kind, ParamKind param, const RoadDescriptor& road) const;

 private:
  std::map<std::pair<StatementKind, ParamKind>, Entry> entries_;
};

enum class RangeSource { Proposed, Default };

struct RangeDecision {
  std::size_t slot;
  RangeSource source;
  Range range;
  /// Why a proposal was refused; empty when adopted or absent.
  std::string reason;
};

/// Every slot ends up ranged. A proposal is adopted only when it is well
/// formed, physically possible, a subset of the default range, and - for
/// constructor offsets of vehicles that may share a lane - separated from the
/// other vehicle's proposal by at least `vehicle_length`.
///
/// Trigger defaults are staggered per vehicle: the k-th of m actions gets
/// [lo+k-1, hi-m+k] so sampled ordinals can be strictly increasing.
LogicalScenario fill_ranges(const TestCaseTemplate& tpl, const ProposedRanges& proposed,
                            const DefaultRangeTable& defaults, double vehicle_length = kDefaultVehicleLength,
                            std::vector<RangeDecision>* decisions = nullptr);

struct EgoAssignment {
  VehicleId ego;
  std::map<VehicleId, int> active_counts;
};

/// The vehicle acting as pattern actor least often; lowest index on ties.
EgoAssignment select_ego(const Ips& ips);

/// Drops the ego's actions and flags its constructor as the ego. Throws
/// UnknownEgo if the scenario has no constructor for `ego`.
LogicalScenario substitute_ego(const LogicalScenario& ls, VehicleId ego);

}  // namespace scengen

#endif  // SCENGEN_LOGICALIZE_HPP_
