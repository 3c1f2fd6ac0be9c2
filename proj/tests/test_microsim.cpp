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

#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "generators.hpp"
#include "scengen/error.hpp"
#include "scengen/fitness.hpp"
#include "scengen/microsim.hpp"

namespace scengen {
namespace {

ConcreteTestCase concrete(const std::string& text) { return parse_concrete(text); }

TEST(Microsim, ConstantSpeedClosedForm) {
  auto tc = concrete(
      "road(straight, lanes=2)\n"
      "ego(V1, lane=1, offset=0, speed=12)\n"
      "npc(V2, lane=2, offset=30, speed=7.5)\n");
  SimConfig cfg;
  auto t = simulate(tc, cfg);
  ASSERT_EQ(t.steps.size(), 251u);
  EXPECT_FALSE(t.collision);
  EXPECT_EQ(t.ids, (std::vector<VehicleId>{VehicleId{1}, VehicleId{2}}));
  for (std::size_t k = 0; k < t.steps.size(); ++k) {
    const double time = static_cast<double>(k) * cfg.dt;
    EXPECT_NEAR(t.steps[k][0].s, 12.0 * time, 1e-9);
    EXPECT_NEAR(t.steps[k][1].s, 30.0 + 7.5 * time, 1e-9);
    EXPECT_EQ(t.steps[k][0].a, 0.0);
  }
}

TEST(Microsim, EgoIsFirstEvenIfDeclaredLater) {
  auto tc = concrete(
      "road(straight, lanes=2)\n"
      "npc(V1, lane=2, offset=30, speed=5)\n"
      "ego(V2, lane=1, offset=0, speed=5)\n");
  auto t = simulate(tc, SimConfig{});
  EXPECT_EQ(t.ids.front(), VehicleId{2});
}

TEST(Microsim, DecelerateActionProfile) {
  auto tc = concrete(
      "road(straight, lanes=2)\n"
      "ego(V1, lane=1, offset=0, speed=5)\n"
      "npc(V2, lane=2, offset=50, speed=10)\n"
      "decelerate(V2, speed=2, trigger=1)\n"
      "accelerate(V2, speed=6, trigger=2)\n");
  auto t = simulate(tc, SimConfig{});
  // 4 m/s^2 from t=0 until 2 m/s at t=2, hold, then 2 m/s^2 from t=5 to 6 m/s at t=7.
  EXPECT_NEAR(t.steps[10][1].v, 6.0, 1e-9);
  EXPECT_NEAR(t.steps[20][1].v, 2.0, 1e-9);
  EXPECT_NEAR(t.steps[50][1].v, 2.0, 1e-9);
  EXPECT_NEAR(t.steps[60][1].v, 4.0, 1e-9);
  EXPECT_NEAR(t.steps[70][1].v, 6.0, 1e-9);
  EXPECT_NEAR(t.steps[200][1].v, 6.0, 1e-9);
  ASSERT_EQ(t.actions.size(), 2u);
  EXPECT_DOUBLE_EQ(t.actions[0].start, 0.0);
  EXPECT_DOUBLE_EQ(t.actions[0].end, 5.0);
  EXPECT_DOUBLE_EQ(t.actions[1].start, 5.0);
  EXPECT_TRUE(t.actions[0].started && t.actions[0].effective);
}

TEST(Microsim, AccelerateBelowCurrentSpeedIsIneffective) {
  auto tc = concrete(
      "road(straight, lanes=2)\n"
      "ego(V1, lane=1, offset=0, speed=5)\n"
      "npc(V2, lane=2, offset=50, speed=10)\n"
      "accelerate(V2, speed=8, trigger=1)\n");
  auto t = simulate(tc, SimConfig{});
  EXPECT_TRUE(t.actions[0].started);
  EXPECT_FALSE(t.actions[0].effective);
  EXPECT_NEAR(t.steps.back()[1].v, 10.0, 1e-12);
}

TEST(Microsim, LaneChangeIsSmoothAndCompletes) {
  auto tc = concrete(
      "road(straight, lanes=2)\n"
      "ego(V1, lane=1, offset=0, speed=5)\n"
      "npc(V2, lane=2, offset=100, speed=5)\n"
      "lane_change(V2, lane=1, speed=5, trigger=1)\n");
  auto t = simulate(tc, SimConfig{});
  EXPECT_EQ(t.steps[0][1].lane, 2.0);
  EXPECT_NEAR(t.steps[15][1].lane, 1.5, 1e-12);
  EXPECT_EQ(t.steps[30][1].lane, 1.0);
  for (std::size_t k = 1; k <= 30; ++k) EXPECT_LE(t.steps[k][1].lane, t.steps[k - 1][1].lane);
  EXPECT_LT(t.steps[15][1].heading, 0.0);  // moving right
}

TEST(Microsim, EgoBrakesForStoppedLeader) {
  auto tc = concrete(
      "road(straight, lanes=1)\n"
      "ego(V1, lane=1, offset=0, speed=10)\n"
      "npc(V2, lane=1, offset=80, speed=0)\n");
  auto t = simulate(tc, SimConfig{});
  EXPECT_FALSE(t.collision);
  EXPECT_LT(t.steps.back()[0].v, 1.0);
  EXPECT_GE(mhd(t), 4.5);
}

TEST(Microsim, CollisionTruncatesTrace) {
  // The NPC cuts in right in front of a faster ego.
  auto tc = concrete(
      "road(straight, lanes=2)\n"
      "ego(V1, lane=1, offset=0, speed=16)\n"
      "npc(V2, lane=2, offset=8, speed=4)\n"
      "lane_change(V2, lane=1, speed=4, trigger=1)\n");
  SimConfig cfg;
  auto t = simulate(tc, cfg);
  ASSERT_TRUE(t.collision);
  EXPECT_EQ(t.collision->npc, VehicleId{2});
  EXPECT_EQ(t.collision->step + 1, t.steps.size());
  EXPECT_DOUBLE_EQ(t.collision->time, t.time(t.collision->step));
  EXPECT_EQ(detect_collision(t, cfg.collision_threshold), t.collision);
  EXPECT_LT(mhd(t), cfg.collision_threshold);
}

TEST(Microsim, CollisionAtStepZero) {
  auto tc = concrete(
      "road(straight, lanes=2)\n"
      "ego(V1, lane=1, offset=0, speed=10)\n"
      "npc(V2, lane=2, offset=1, speed=10)\n");
  SimConfig cfg;
  cfg.lane_width = 3.0;
  auto t = simulate(tc, cfg);
  ASSERT_TRUE(t.collision);
  EXPECT_EQ(t.collision->step, 0u);
  EXPECT_EQ(t.steps.size(), 1u);
}

TEST(Microsim, RejectsInvalidCases) {
  auto overlap = concrete(
      "road(straight, lanes=2)\n"
      "ego(V1, lane=1, offset=0, speed=10)\n"
      "npc(V2, lane=1, offset=2, speed=10)\n");
  EXPECT_THROW(simulate(overlap, SimConfig{}), InvalidTestCase);
  auto no_ego = concrete("road(straight, lanes=2)\nnpc(V1, lane=1, offset=0, speed=10)\n");
  EXPECT_THROW(simulate(no_ego, SimConfig{}), InvalidTestCase);
  SimConfig bad;
  bad.dt = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = SimConfig{};
  bad.physics.npc_decel = 9;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Headway, CurvedRoadChord) {
  RoadModel road{RoadShape::Curved, 2, 5.0, 200.0};
  VehicleState a{VehicleId{1}, 1.0, 0.0};
  VehicleState b{VehicleId{2}, 1.0, 50.0};
  EXPECT_NEAR(headway_distance(a, b, road), 2 * 200.0 * std::sin(50.0 / 400.0), 1e-9);
  // Lane 2 lies on the inside of the bend.
  VehicleState c{VehicleId{2}, 2.0, 0.0};
  EXPECT_NEAR(headway_distance(a, c, road), 5.0, 1e-12);
  const Point2 p = headway_position({VehicleId{1}, 2.0, 200.0 * std::numbers::pi / 2}, road);
  EXPECT_NEAR(p.x, 195.0, 1e-9);
  EXPECT_NEAR(p.y, 200.0, 1e-9);
}

TEST(Headway, StraightRoad) {
  RoadModel road{RoadShape::Straight, 3, 5.0, 200.0};
  EXPECT_DOUBLE_EQ(headway_distance({VehicleId{1}, 1, 0}, {VehicleId{2}, 3, 3}, road), std::hypot(3.0, 10.0));
}

TEST(Microsim, InvariantsOnRandomCases) {
  testing::Gen g(21);
  SimConfig cfg;
  for (int i = 0; i < 100; ++i) {
    auto ls = testing::random_sim_scenario(g);
    ConcreteTestCase tc;
    do {
      tc = instantiate(ls, testing::random_values(g, *ls));
    } while (!validate_concrete(tc).ok());
    auto t = simulate(tc, cfg);
    for (std::size_t k = 1; k < t.steps.size(); ++k) {
      for (std::size_t v = 0; v < t.ids.size(); ++v) {
        const auto& prev = t.steps[k - 1][v];
        const auto& cur = t.steps[k][v];
        ASSERT_GE(cur.v, 0.0);
        ASSERT_NEAR(cur.v, prev.v + cur.a * cfg.dt, 1e-9);
        const double ds = cur.s - prev.s;
        ASSERT_GE(ds, -1e-12);
        ASSERT_LE(ds, 0.5 * (prev.v + cur.v) * cfg.dt + 1e-9);
        if (cur.v > 0) ASSERT_NEAR(ds, 0.5 * (prev.v + cur.v) * cfg.dt, 1e-9);
      }
    }
    EXPECT_EQ(detect_collision(t, cfg.collision_threshold).has_value(), mhd(t) < cfg.collision_threshold);
  }
}

TEST(Microsim, Deterministic) {
  auto tc = concrete(
      "road(curved, lanes=2)\n"
      "ego(V1, lane=1, offset=0, speed=14)\n"
      "npc(V2, lane=2, offset=20, speed=9)\n"
      "lane_change(V2, lane=1, speed=3, trigger=1)\n");
  auto a = simulate(tc, SimConfig{});
  auto b = simulate(tc, SimConfig{});
  EXPECT_EQ(a.steps, b.steps);
  EXPECT_EQ(trace_to_csv(a), trace_to_csv(b));
}

TEST(Export, CsvAndJson) {
  auto tc = concrete(
      "road(straight, lanes=2)\n"
      "ego(V1, lane=1, offset=0, speed=10)\n"
      "npc(V2, lane=2, offset=30, speed=10)\n");
  SimConfig cfg;
  cfg.horizon = 0.2;
  auto t = simulate(tc, cfg);
  EXPECT_EQ(trace_to_csv(t),
            "t,id,lane,s,v,a\n0,V1,1,0,10,0\n0,V2,2,30,10,0\n0.1,V1,1,1,10,0\n0.1,V2,2,31,10,0\n"
            "0.2,V1,1,2,10,0\n0.2,V2,2,32,10,0\n");
  auto j = nlohmann::json::parse(trace_to_json(t));
  EXPECT_EQ(j["ego"], "V1");
  EXPECT_TRUE(j["collision"].is_null());
  EXPECT_EQ(j["steps"].size(), 3u);
}

}  // namespace
}  // namespace scengen
