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

// Deterministic kinematic multi-lane simulator. NPCs follow their scripted
// actions; the ego runs a simple time-headway car-following policy with
// lane keeping. It is a stand-in for a full ADS stack, not a model of one:
// its perception only notices a vehicle once that vehicle is mostly inside
// the ego lane, which leaves room for cut-in collisions.
//
// Vehicles move in road-aligned coordinates: `s` is the front-bumper
// position along the road, `lane` a continuous lane coordinate (lane 1 is
// the rightmost, ids grow to the left). Curved roads bend left with a
// constant radius and share all longitudinal logic with straight ones.

#ifndef SCENGEN_MICROSIM_HPP_
#define SCENGEN_MICROSIM_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "scengen/dsl.hpp"
#include "scengen/ips.hpp"

namespace scengen {

struct RoadModel {
  RoadShape shape = RoadShape::Straight;
  int lane_count = 1;
  double lane_width = 5.0;
  /// Only meaningful for curved roads.
  double radius = 200.0;

  /// Throws ConfigError.
  void validate() const;
};

struct EgoPolicyConfig {
  /// Cruise speed when `cruise_at_initial_speed` is off.
  double desired_speed = 15.0;
  bool cruise_at_initial_speed = true;
  double safe_time_headway = 1.5;
  double max_brake = 8.0;
  bool lane_keep = true;
  /// Proportional gain toward the cruise speed (1/s).
  double speed_gain = 0.5;
  /// No acceleration while the gap to the leader is below v*h plus this
  /// (m); keeps a stopped ego from creeping into a stopped leader.
  double standstill_gap = 2.0;
  /// A vehicle counts as being in the ego lane when its lane coordinate is
  /// closer than this to the ego's.
  double perception_lane_tolerance = 0.5;
};

struct PhysicsConfig {
  double accel_max = 4.0;
  double brake_max = 8.0;
  double npc_accel = 2.0;
  double npc_decel = 4.0;
  double action_duration = 5.0;
  double lane_change_time = 3.0;
  double vehicle_length = kDefaultVehicleLength;
};

struct SimConfig {
  double horizon = 25.0;
  double dt = 0.1;
  double lane_width = 5.0;
  double curve_radius = 200.0;
  double collision_threshold = kDefaultVehicleLength;
  PhysicsConfig physics;
  EgoPolicyConfig ego;

  void validate() const;
  RoadModel road_for(const RoadDescriptor& road) const;
};

struct VehicleState {
  VehicleId id;
  double lane = 1.0;
  double s = 0.0;
  double v = 0.0;
  double a = 0.0;
  double heading = 0.0;

  bool operator==(const VehicleState&) const = default;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct CollisionEvent {
  double time = 0.0;
  std::size_t step = 0;
  VehicleId npc;

  bool operator==(const CollisionEvent&) const = default;
};

/// One scheduled NPC action as executed.
struct ActionRecord {
  VehicleId vehicle;
  StatementKind kind;
  std::size_t statement = 0;
  double start = 0.0;
  double end = 0.0;
  bool started = false;
  /// The action changed speed or lane (an accelerate below the current speed
  /// does not).
  bool effective = false;

  bool operator==(const ActionRecord&) const = default;
};

struct SimTrace {
  double dt = 0.1;
  /// Configured horizon T; the trace may stop earlier at a collision.
  double horizon = 0.0;
  RoadModel road;
  double vehicle_length = kDefaultVehicleLength;
  /// ids[0] is the ego; steps[k][i] is the state of ids[i] at time k*dt.
  std::vector<VehicleId> ids;
  std::vector<std::vector<VehicleState>> steps;
  std::optional<CollisionEvent> collision;
  std::vector<ActionRecord> actions;

  double time(std::size_t step) const { return static_cast<double>(step) * dt; }
  /// Covered duration, (steps-1)*dt.
  double duration() const { return steps.empty() ? 0.0 : time(steps.size() - 1); }
  std::size_t npc_count() const { return ids.empty() ? 0 : ids.size() - 1; }
};

/// Front-bumper midpoint in world coordinates.
Point2 headway_position(const VehicleState& state, const RoadModel& road);
double headway_distance(const VehicleState& a, const VehicleState& b, const RoadModel& road);

/// Runs `tc` until `cfg.horizon` or the first ego/NPC headway distance below
/// `cfg.collision_threshold`. Throws InvalidTestCase when the case fails
/// validate_concrete or declares no ego, ConfigError for a bad config.
SimTrace simulate(const ConcreteTestCase& tc, const SimConfig& cfg);

/// First step whose minimum ego/NPC headway distance is below `threshold`.
std::optional<CollisionEvent> detect_collision(const SimTrace& trace, double threshold);

/// Columns t,id,lane,s,v,a; one row per vehicle per step.
std::string trace_to_csv(const SimTrace& trace);
std::string trace_to_json(const SimTrace& trace);

}  // namespace scengen

#endif  // SCENGEN_MICROSIM_HPP_
