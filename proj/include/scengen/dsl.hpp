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

// Sequential test-case DSL. A test case is a list of vehicle constructors
// followed by NPC actions; each statement carries a fixed set of parameter
// slots. The same syntax covers all three refinement levels:
//
//   road(straight, lanes=3)
//   npc(V1, lane=?, offset=?, speed=?)                    template
//   npc(V1, lane=[1,3], offset=[0,80], speed=[0,20])      logical scenario
//   npc(V1, lane=2 in [1,3], offset=12.5 in [0,80], ...)  concrete test case
//   ego(V3, lane=3, offset=[0,40], speed=[5,15])          ego constructor
//   lane_change(V1, lane=2, speed=[5,15], trigger=[1,2])
//   seed(42)                                              concrete only
//
// Parameter tables:
//   npc / ego    lane (int), offset (m), speed (m/s)
//   accelerate   speed (m/s, target), trigger (ordinal)
//   decelerate   speed (m/s, target), trigger (ordinal)
//   lane_change  lane (int, target), speed (m/s, target), trigger (ordinal)

#ifndef SCENGEN_DSL_HPP_
#define SCENGEN_DSL_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "scengen/ips.hpp"

namespace scengen {

enum class StatementKind { NpcConstructor, Accelerate, Decelerate, LaneChange };

enum class ParamKind { LaneId, LaneOffset, InitialSpeed, TargetSpeed, TriggerSequence, TargetLane };

std::string_view statement_keyword(StatementKind kind);
std::string_view param_name(ParamKind kind);
bool is_integer_param(ParamKind kind);
bool is_speed_param(ParamKind kind);
std::span<const ParamKind> param_kinds(StatementKind kind);

struct Range {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double v) const { return lo <= v && v <= hi; }
  bool subset_of(const Range& other) const { return other.lo <= lo && hi <= other.hi; }
  double width() const { return hi - lo; }
  bool operator==(const Range&) const = default;
};

struct Unbound {
  bool operator==(const Unbound&) const = default;
};

/// A bound value; `range` remembers the logical range it was drawn from.
struct Bound {
  double value = 0.0;
  std::optional<Range> range;
  bool operator==(const Bound&) const = default;
};

using SlotState = std::variant<Unbound, Range, Bound>;

struct ParamSlot {
  ParamKind kind;
  SlotState state;
  bool operator==(const ParamSlot&) const = default;
};

struct Statement {
  StatementKind kind;
  VehicleId subject;
  std::vector<ParamSlot> params;

  bool is_constructor() const { return kind == StatementKind::NpcConstructor; }
  bool operator==(const Statement&) const = default;
};

struct TestCaseTemplate {
  RoadDescriptor road;
  std::vector<Statement> statements;
  std::optional<VehicleId> ego;

  std::size_t length() const { return statements.size(); }
  std::size_t slot_count() const;
  /// Vehicles in constructor order.
  std::vector<VehicleId> vehicles() const;
  /// Constructor-order vehicles excluding the ego.
  std::vector<VehicleId> npcs() const;
  bool operator==(const TestCaseTemplate&) const = default;
};

/// Same statements, subjects and slot kinds; slot states may differ.
bool same_structure(const TestCaseTemplate& a, const TestCaseTemplate& b);

/// Flat index of one parameter slot.
struct SlotRef {
  std::size_t statement;
  std::size_t param;
  StatementKind statement_kind;
  ParamKind kind;
  VehicleId subject;
};

std::vector<SlotRef> slot_refs(const TestCaseTemplate& tpl);

/// A template whose every slot is ranged.
class LogicalScenario {
 public:
  /// Throws InvalidTestCase if a slot is not in Range state or an integer slot's
  /// range contains no integer.
  explicit LogicalScenario(TestCaseTemplate tpl);

  const TestCaseTemplate& tpl() const { return tpl_; }
  const RoadDescriptor& road() const { return tpl_.road; }
  std::size_t dimension() const { return slots_.size(); }
  const std::vector<SlotRef>& slots() const { return slots_; }
  const Range& range(std::size_t slot) const { return ranges_[slot]; }
  const std::vector<Range>& ranges() const { return ranges_; }
  bool integer_slot(std::size_t slot) const { return is_integer_param(slots_[slot].kind); }
  /// Flat index of (statement, param).
  std::size_t slot_index(std::size_t statement, std::size_t param) const {
    return offsets_[statement] + param;
  }

  bool operator==(const LogicalScenario& other) const { return tpl_ == other.tpl_; }

 private:
  TestCaseTemplate tpl_;
  std::vector<SlotRef> slots_;
  std::vector<Range> ranges_;
  std::vector<std::size_t> offsets_;
};

using LogicalScenarioPtr = std::shared_ptr<const LogicalScenario>;

struct ConcreteTestCase {
  LogicalScenarioPtr scenario;
  std::vector<double> values;
  std::int64_t seed_id = 0;

  double param(std::size_t statement, std::size_t param_index) const {
    return values[scenario->slot_index(statement, param_index)];
  }
  /// The scenario template with each slot Bound to its value (range kept).
  TestCaseTemplate bound_template() const;

  bool operator==(const ConcreteTestCase& other) const;
};

/// Throws ParseError / ArityError.
TestCaseTemplate parse_template(std::string_view text);
LogicalScenario parse_logical(std::string_view text);
/// Every slot must be written as `v in [lo,hi]` (or a bare value, which is
/// taken as the degenerate range [v,v]).
ConcreteTestCase parse_concrete(std::string_view text);

std::string serialize_template(const TestCaseTemplate& tpl);
std::string serialize_logical(const LogicalScenario& ls);
std::string serialize_concrete(const ConcreteTestCase& tc);

/// Binds `values` to the scenario's slots. Throws DimensionMismatch on a
/// wrong vector length and OutOfRange for a value outside its range or a
/// non-integral value in an integer slot.
ConcreteTestCase instantiate(const LogicalScenarioPtr& ls, std::vector<double> values,
                             std::int64_t seed_id = 0);

enum class ValidationCode { LongitudinalOverlap, LaneOutOfRoad, NegativeSpeed, TriggerOrder };

struct ValidationIssue {
  ValidationCode code;
  std::size_t statement;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  bool has(ValidationCode code) const;
};

inline constexpr double kDefaultVehicleLength = 4.5;

/// Static checks on a bound test case: same-lane constructors closer than
/// `vehicle_length`, lane ids outside the road, negative speeds, and
/// per-vehicle trigger ordinals that are not strictly increasing.
ValidationReport validate_concrete(const ConcreteTestCase& tc, const RoadDescriptor& road,
                                   double vehicle_length = kDefaultVehicleLength);
inline ValidationReport validate_concrete(const ConcreteTestCase& tc,
                                          double vehicle_length = kDefaultVehicleLength) {
  return validate_concrete(tc, tc.scenario->road(), vehicle_length);
}

/// JSON export of an assignment for reports:
/// {"seed_id":..,"values":[..],"slots":[{"statement","vehicle","call","param","value","range"}]}
std::string assignment_json(const ConcreteTestCase& tc);

}  // namespace scengen

#endif  // SCENGEN_DSL_HPP_
