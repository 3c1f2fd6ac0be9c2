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

// Interactive pattern sequences: the intermediate representation between an
// accident narrative and a formal test case. An IPS lists one initial action
// per vehicle followed by pairwise interactive patterns in chronological
// order.
//
// Text format (one statement per line, LF endings, `#` starts a comment):
//
//   road: straight, lanes: 3
//   V1: travels in lane 1 intending to overtake V2
//   V2: travels in lane 2
//   (V1, V2): V1 swerves left and strikes V2, V2 brakes
//
// Verbs are recognised by case-insensitive keyword match inside pattern text
// and are attributed to the nearest preceding vehicle mention.

#ifndef SCENGEN_IPS_HPP_
#define SCENGEN_IPS_HPP_

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scengen {

struct VehicleId {
  int index = 1;

  std::string str() const { return "V" + std::to_string(index); }
  /// Accepts exactly "V<n>" with n >= 1; nullopt otherwise.
  static std::optional<VehicleId> parse(std::string_view text);

  auto operator<=>(const VehicleId&) const = default;
};

enum class ActionVerb { Brake, Decelerate, Accelerate, SwerveLeft, SwerveRight };

/// Canonical keyword: "brake", "decelerate", "accelerate", "swerve left",
/// "swerve right".
std::string_view verb_keyword(ActionVerb verb);
std::optional<ActionVerb> verb_from_keyword(std::string_view keyword);

enum class RoadShape { Straight, Curved };

std::string_view road_shape_name(RoadShape shape);
std::optional<RoadShape> road_shape_from_name(std::string_view name);

struct RoadDescriptor {
  RoadShape shape = RoadShape::Straight;
  int lane_count = 1;

  bool operator==(const RoadDescriptor&) const = default;
};

struct InitialAction {
  VehicleId vehicle;
  std::string description;

  bool operator==(const InitialAction&) const = default;
};

/// One pairwise interaction. The first listed vehicle is the actor (it
/// performs the active action), the second is the reactor.
///
/// Verbs are held as keywords rather than `ActionVerb` so that an illegal
/// value can be represented and reported by the legality check.
struct InteractivePattern {
  std::vector<VehicleId> vehicles;
  std::string actor_verb;
  std::optional<std::string> reactor_verb;
  std::string description;

  VehicleId actor() const { return vehicles.at(0); }
  VehicleId reactor() const { return vehicles.at(1); }
  std::optional<ActionVerb> actor_action() const { return verb_from_keyword(actor_verb); }

  bool operator==(const InteractivePattern&) const = default;
};

struct Ips {
  RoadDescriptor road;
  std::vector<InitialAction> initials;
  std::vector<InteractivePattern> patterns;

  bool operator==(const Ips&) const = default;
};

enum class LegalityRule {
  R1_TwoVehicles,
  R2_ClosedVerbSet,
  R3_DeclaredVehicles,
  R4_DistinctActorReactor,
  R5_NonEmpty,
};

std::string_view rule_id(LegalityRule rule);

struct LegalityViolation {
  LegalityRule rule;
  /// "pattern 2", "initials", ... ; human oriented.
  std::string location;
  std::string message;

  bool operator==(const LegalityViolation&) const = default;
};

struct LegalityReport {
  std::vector<LegalityViolation> violations;

  bool ok() const { return violations.empty(); }
  bool has(LegalityRule rule) const;
  /// One "R<n> <location>: <message>" line per violation.
  std::vector<std::string> lines() const;
};

/// Throws ParseError (with line/column) on malformed input, a pattern that
/// does not name exactly two vehicles, a pattern without a recognised active
/// verb, or a duplicate initial action.
Ips parse_ips(std::string_view text);

/// Canonical text; parse_ips(serialize_ips(x)) == x for every legal x.
std::string serialize_ips(const Ips& ips);

/// Syntactic legality. R1 and R2 mirror the extraction rules given to the
/// language model; R3 to R5 are additional structural rules of this library.
LegalityReport check_legality(const Ips& ips);

/// Verbs detected in free text, in order of appearance, each paired with the
/// vehicle mentioned most recently before it (if any).
struct DetectedVerb {
  ActionVerb verb;
  std::optional<VehicleId> subject;
  std::size_t offset;
};
std::vector<DetectedVerb> detect_verbs(std::string_view text);

}  // namespace scengen

#endif  // SCENGEN_IPS_HPP_
