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

#include <gtest/gtest.h>

#include "scengen/error.hpp"
#include "scengen/logicalize.hpp"

namespace scengen {
namespace {

// Slots: V1 0..2, V2 3..5, V1 decelerate 6..7, V1 lane_change 8..10, V2 accelerate 11..12.
constexpr const char* kTemplate =
    "road(straight, lanes=3)\n"
    "npc(V1, lane=?, offset=?, speed=?)\n"
    "npc(V2, lane=?, offset=?, speed=?)\n"
    "decelerate(V1, speed=?, trigger=?)\n"
    "lane_change(V1, lane=?, speed=?, trigger=?)\n"
    "accelerate(V2, speed=?, trigger=?)\n";

TEST(Defaults, BuiltinLookup) {
  auto t = DefaultRangeTable::builtin();
  RoadDescriptor road{RoadShape::Straight, 3};
  EXPECT_EQ(t.lookup(StatementKind::NpcConstructor, ParamKind::LaneId, road), (Range{1, 3}));
  EXPECT_EQ(t.lookup(StatementKind::LaneChange, ParamKind::TargetLane, road), (Range{1, 3}));
  EXPECT_EQ(t.lookup(StatementKind::NpcConstructor, ParamKind::LaneOffset, road), (Range{0, 80}));
  EXPECT_EQ(t.lookup(StatementKind::Decelerate, ParamKind::TriggerSequence, road), (Range{1, 4}));
  t.erase(StatementKind::Decelerate, ParamKind::TargetSpeed);
  EXPECT_THROW(t.lookup(StatementKind::Decelerate, ParamKind::TargetSpeed, road), MissingDefault);
}

TEST(Defaults, JsonRoundTripAndValidation) {
  auto t = DefaultRangeTable::builtin();
  EXPECT_EQ(DefaultRangeTable::from_json(t.to_json()).to_json(), t.to_json());
  EXPECT_THROW(DefaultRangeTable::from_json("{"), ConfigError);
  EXPECT_THROW(DefaultRangeTable::from_json(R"({"brake": {"speed": [0, 1]}})"), ConfigError);
  EXPECT_THROW(DefaultRangeTable::from_json(R"({"npc": {"speed": [-1, 1]}})"), ConfigError);
  EXPECT_THROW(DefaultRangeTable::from_json(R"({"npc": {"offset": [5, 1]}})"), ConfigError);
  EXPECT_THROW(DefaultRangeTable::from_json(R"({"npc": {"offset": "road"}})"), ConfigError);
  EXPECT_THROW(DefaultRangeTable::from_json(R"({"accelerate": {"trigger": "road"}})"), ConfigError);
  EXPECT_THROW(DefaultRangeTable::from_json(R"({"npc": {"wheels": [1, 2]}})"), ConfigError);
}

TEST(FillRanges, DefaultsWithStaggeredTriggers) {
  auto tpl = parse_template(kTemplate);
  std::vector<RangeDecision> d;
  auto ls = fill_ranges(tpl, {}, DefaultRangeTable::builtin(), 4.5, &d);
  ASSERT_EQ(ls.dimension(), 13u);
  EXPECT_EQ(ls.range(0), (Range{1, 3}));
  EXPECT_EQ(ls.range(7), (Range{1, 3}));   // first of two V1 actions
  EXPECT_EQ(ls.range(10), (Range{2, 4}));  // second of two
  EXPECT_EQ(ls.range(12), (Range{1, 4}));  // only V2 action
  for (const auto& x : d) EXPECT_EQ(x.source, RangeSource::Default);
}

TEST(FillRanges, ProposalsScreened) {
  auto tpl = parse_template(kTemplate);
  ProposedRanges proposed{
      {0, {1, 1}},      // adopted
      {2, {-1, 5}},     // negative speed
      {3, {2, 4}},      // lane outside a 3-lane road
      {6, {0, 30}},     // exceeds default [0,25]
      {7, {1.2, 1.8}},  // no integer
      {9, {5, 10}},     // adopted
  };
  std::vector<RangeDecision> d;
  auto ls = fill_ranges(tpl, proposed, DefaultRangeTable::builtin(), 4.5, &d);
  EXPECT_EQ(d[0].source, RangeSource::Proposed);
  EXPECT_EQ(ls.range(0), (Range{1, 1}));
  EXPECT_EQ(d[9].source, RangeSource::Proposed);
  for (std::size_t s : {2u, 3u, 6u, 7u}) {
    EXPECT_EQ(d[s].source, RangeSource::Default) << s;
    EXPECT_FALSE(d[s].reason.empty()) << s;
  }
  EXPECT_NE(d[2].reason.find("negative speed"), std::string::npos);
  EXPECT_EQ(ls.range(2), (Range{0, 20}));
}

TEST(FillRanges, OverlappingStartsRevert) {
  auto tpl = parse_template(kTemplate);
  // Same lane, offsets [10,20] and [22,30]: gap 2 < vehicle length.
  ProposedRanges proposed{{0, {1, 1}}, {1, {10, 20}}, {3, {1, 1}}, {4, {22, 30}}};
  std::vector<RangeDecision> d;
  auto ls = fill_ranges(tpl, proposed, DefaultRangeTable::builtin(), 4.5, &d);
  EXPECT_EQ(d[1].source, RangeSource::Default);
  EXPECT_EQ(d[4].source, RangeSource::Default);
  EXPECT_EQ(ls.range(4), (Range{0, 80}));

  proposed[4] = {24.5, 30};
  fill_ranges(tpl, proposed, DefaultRangeTable::builtin(), 4.5, &d);
  EXPECT_EQ(d[1].source, RangeSource::Proposed);
  EXPECT_EQ(d[4].source, RangeSource::Proposed);

  // Different lanes never conflict.
  proposed = {{0, {1, 1}}, {1, {10, 20}}, {3, {2, 2}}, {4, {10, 20}}};
  fill_ranges(tpl, proposed, DefaultRangeTable::builtin(), 4.5, &d);
  EXPECT_EQ(d[4].source, RangeSource::Proposed);
}

TEST(SelectEgo, FewestActiveActions) {
  Ips ips = parse_ips(
      "road: straight, lanes: 3\n"
      "V1: a.\nV2: b.\nV3: c.\n"
      "(V1, V2): V1 swerves left into V2, V2 brakes.\n"
      "(V2, V3): V2 swerves left into V3.\n");
  auto e = select_ego(ips);
  EXPECT_EQ(e.ego, VehicleId{3});
  EXPECT_EQ(e.active_counts.at(VehicleId{1}), 1);
  EXPECT_EQ(e.active_counts.at(VehicleId{2}), 1);
  EXPECT_EQ(e.active_counts.at(VehicleId{3}), 0);
}

TEST(SelectEgo, TieGoesToLowestIndex) {
  Ips ips = parse_ips(
      "road: straight, lanes: 2\n"
      "V1: a.\nV2: b.\nV3: c.\n"
      "(V3, V2): V3 brakes near V2.\n");
  EXPECT_EQ(select_ego(ips).ego, VehicleId{1});
  EXPECT_THROW(select_ego(Ips{}), UnknownEgo);
}

TEST(SubstituteEgo, DropsEgoActions) {
  auto ls = fill_ranges(parse_template(kTemplate), {}, DefaultRangeTable::builtin());
  auto sub = substitute_ego(ls, VehicleId{1});
  EXPECT_EQ(sub.tpl().ego, VehicleId{1});
  ASSERT_EQ(sub.tpl().statements.size(), 3u);
  EXPECT_EQ(sub.tpl().statements[2].kind, StatementKind::Accelerate);
  EXPECT_EQ(sub.dimension(), 8u);
  EXPECT_THROW(substitute_ego(ls, VehicleId{9}), UnknownEgo);
}

}  // namespace
}  // namespace scengen
