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

// Groups critical cases into types by what the NPCs were doing shortly
// before the collision, and computes campaign metrics over repetitions.

#ifndef SCENGEN_TRIAGE_HPP_
#define SCENGEN_TRIAGE_HPP_

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scengen/microsim.hpp"
#include "scengen/search.hpp"

namespace scengen {

enum class CollisionGeometry { RearEnd, LaneChangeSideswipe, CutInFrontal };
std::string_view geometry_name(CollisionGeometry g);

enum class VehicleRole { Collider, Other };

struct SignatureAction {
  VehicleRole role;
  StatementKind kind;
  auto operator<=>(const SignatureAction&) const = default;
};

struct TypeSignature {
  RoadShape road = RoadShape::Straight;
  int npc_count = 0;
  /// Ordered by action start time, then vehicle id.
  std::vector<SignatureAction> actions;
  CollisionGeometry geometry = CollisionGeometry::RearEnd;

  auto operator<=>(const TypeSignature&) const = default;
  /// Canonical text form, e.g. "straight|2|npc:lane_change,collider:lane_change|cut_in_frontal".
  std::string key() const;
};

struct TriageConfig {
  /// Only actions overlapping [t_c - window, t_c] count.
  double window = 10.0;
  /// Lane-coordinate difference at impact below which a hit is a rear-end.
  double rear_end_lane_tolerance = 0.3;
};

/// Throws NotCritical when the trace has no collision.
TypeSignature classify(const SimTrace& trace, const TriageConfig& cfg = {});
/// Throws NotCritical for a case without a recorded trace or collision.
TypeSignature classify(const EvaluatedCase& evaluated, const TriageConfig& cfg = {});

/// Outcome of one repetition of one method.
struct RepetitionOutcome {
  std::size_t simulations = 0;
  /// (1-based simulation index, signature) per harvested critical case,
  /// in discovery order.
  std::vector<std::pair<std::size_t, TypeSignature>> criticals;
  double wall_seconds = 0.0;
};

struct Stat {
  double mean = 0.0;
  double std = 0.0;
  /// Repetitions in which the value was defined.
  std::size_t defined = 0;
  bool reached() const { return defined > 0; }
};

struct CampaignMetrics {
  std::size_t repetitions = 0;
  Stat n_types;
  Stat type_expos_rate;
  /// Simulations until the first critical type appeared.
  Stat sim_for_first_type;
  /// Simulations until the last distinct type of the repetition appeared.
  Stat sim_for_all_types;
  Stat time_for_one_scenario;
  /// Some repetition found no critical case; its rate is reported as 0.
  bool rate_undefined = false;
};

/// Mean and population standard deviation over repetitions. Throws
/// EmptyHistory.
CampaignMetrics metrics(const std::vector<RepetitionOutcome>& repetitions);

std::size_t distinct_types(const RepetitionOutcome& outcome);
/// Number of distinct types found after each simulation 1..simulations.
std::vector<std::size_t> cumulative_types(const RepetitionOutcome& outcome);
std::map<std::string, std::size_t> type_counts(const std::vector<RepetitionOutcome>& outcomes);

std::string metrics_json(const CampaignMetrics& m);

}  // namespace scengen

#endif  // SCENGEN_TRIAGE_HPP_
