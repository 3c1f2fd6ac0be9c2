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

#include "scengen/microsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "scengen/error.hpp"
#include "text_util.hpp"

namespace scengen {

namespace {

struct ScheduledAction {
  ActionRecord record;
  std::size_t vehicle = 0;  // index into the state vector
  long start_step = 0;
  long end_step = 0;
  double target_speed = 0.0;
  double target_lane = 0.0;
};

struct LateralManeuver {
  bool active = false;
  long start_step = 0;
  double from = 0.0;
  double to = 0.0;
};

double toward(double v, double target, double rate_up, double rate_down, double dt) {
  if (target > v) return std::min(rate_up, (target - v) / dt);
  if (target < v) return -std::min(rate_down, (v - target) / dt);
  return 0.0;
}

}  // namespace

void RoadModel::validate() const {
  if (lane_count < 1) throw ConfigError("road needs at least one lane");
  if (!(lane_width > 0)) throw ConfigError("lane width must be positive");
  if (shape == RoadShape::Curved && !(radius > 50.0)) throw ConfigError("curve radius must exceed 50 m");
}

void SimConfig::validate() const {
  if (!(dt > 0.0 && dt <= 0.5)) throw ConfigError("dt must lie in (0, 0.5]");
  if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
  if (!(collision_threshold >= 0.0)) throw ConfigError("collision threshold must be non-negative");
  const auto& p = physics;
  if (!(p.accel_max > 0 && p.brake_max > 0 && p.npc_accel > 0 && p.npc_decel > 0)) {
    throw ConfigError("acceleration limits must be positive");
  }
  if (p.npc_accel > p.accel_max || p.npc_decel > p.brake_max) {
    throw ConfigError("NPC acceleration rates must not exceed the physical limits");
  }
  if (!(p.action_duration > 0 && p.lane_change_time > 0 && p.vehicle_length > 0)) {
    throw ConfigError("durations and vehicle length must be positive");
  }
  const auto& e = ego;
  if (!(e.desired_speed > 0 && e.safe_time_headway > 0 && e.max_brake > 0 && e.speed_gain > 0 &&
        e.perception_lane_tolerance > 0)) {
    throw ConfigError("ego policy parameters must be positive");
  }
  if (e.max_brake > p.brake_max) throw ConfigError("ego max_brake exceeds the physical brake limit");
  if (!(e.standstill_gap >= 0)) throw ConfigError("ego standstill_gap must be non-negative");
}

RoadModel SimConfig::road_for(const RoadDescriptor& road) const {
  RoadModel m{road.shape, road.lane_count, lane_width, curve_radius};
  m.validate();
  return m;
}

Point2 headway_position(const VehicleState& st, const RoadModel& road) {
  const double lateral = (st.lane - 1.0) * road.lane_width;
  if (road.shape == RoadShape::Straight) return {st.s, lateral};
  // Left-hand bend around (0, R); the lane-1 centerline has radius R.
  const double theta = st.s / road.radius;
  const double r = road.radius - lateral;
  return {r * std::sin(theta), road.radius - r * std::cos(theta)};
}

double headway_distance(const VehicleState& a, const VehicleState& b, const RoadModel& road) {
  const Point2 p = headway_position(a, road);
  const Point2 q = headway_position(b, road);
  return std::hypot(p.x - q.x, p.y - q.y);
}

SimTrace simulate(const ConcreteTestCase& tc, const SimConfig& cfg) {
  cfg.validate();
  const auto& tpl = tc.scenario->tpl();
  if (!tpl.ego) throw InvalidTestCase("test case declares no ego vehicle");
  ValidationReport report = validate_concrete(tc, tpl.road, cfg.physics.vehicle_length);
  if (!report.ok()) {
    std::string msg = "invalid test case:";
    for (const auto& issue : report.issues) msg += " " + issue.message + ";";
    throw InvalidTestCase(msg);
  }

  SimTrace trace;
  trace.dt = cfg.dt;
  trace.horizon = cfg.horizon;
  trace.road = cfg.road_for(tpl.road);
  trace.vehicle_length = cfg.physics.vehicle_length;

  const double dt = cfg.dt;
  const auto& phys = cfg.physics;
  const auto& pol = cfg.ego;

  // Ego first, NPCs in constructor order.
  std::vector<VehicleState> state;
  std::vector<std::size_t> ctor_stmt;
  for (std::size_t s = 0; s < tpl.statements.size(); ++s) {
    const auto& st = tpl.statements[s];
    if (!st.is_constructor()) continue;
    VehicleState vs{st.subject, tc.param(s, 0), tc.param(s, 1), tc.param(s, 2), 0.0, 0.0};
    if (st.subject == *tpl.ego) {
      state.insert(state.begin(), vs);
    } else {
      state.push_back(vs);
    }
  }
  for (const auto& vs : state) trace.ids.push_back(vs.id);
  auto index_of = [&](VehicleId id) {
    return static_cast<std::size_t>(std::find(trace.ids.begin(), trace.ids.end(), id) - trace.ids.begin());
  };
  const double cruise = pol.cruise_at_initial_speed ? state[0].v : pol.desired_speed;

  std::vector<ScheduledAction> actions;
  const long duration_steps = std::lround(phys.action_duration / dt);
  for (std::size_t s = 0; s < tpl.statements.size(); ++s) {
    const auto& st = tpl.statements[s];
    if (st.is_constructor()) continue;
    ScheduledAction a;
    a.vehicle = index_of(st.subject);
    const double trigger = tc.param(s, st.params.size() - 1);
    a.start_step = std::lround((trigger - 1.0) * phys.action_duration / dt);
    a.end_step = a.start_step + duration_steps;
    if (st.kind == StatementKind::LaneChange) {
      a.target_lane = tc.param(s, 0);
      a.target_speed = tc.param(s, 1);
    } else {
      a.target_speed = tc.param(s, 0);
    }
    a.record = {st.subject, st.kind, s, a.start_step * dt, a.end_step * dt, false, false};
    actions.push_back(a);
  }

  std::vector<LateralManeuver> lateral(state.size());
  const long total_steps = std::lround(cfg.horizon / dt);
  const long lc_steps = std::max(1L, std::lround(phys.lane_change_time / dt));

  auto check_collision = [&](std::size_t step) -> bool {
    for (std::size_t i = 1; i < state.size(); ++i) {
      if (headway_distance(state[0], state[i], trace.road) < cfg.collision_threshold) {
        trace.collision = CollisionEvent{trace.time(step), step, state[i].id};
        return true;
      }
    }
    return false;
  };

  trace.steps.push_back(state);
  if (check_collision(0)) {
    for (auto& a : actions) trace.actions.push_back(a.record);
    return trace;
  }

  std::vector<double> accel(state.size(), 0.0);
  std::vector<double> lateral_rate(state.size(), 0.0);
  for (long k = 0; k < total_steps; ++k) {
    std::fill(accel.begin(), accel.end(), 0.0);

    // Scripted NPCs.
    for (auto& a : actions) {
      if (k < a.start_step || k >= a.end_step) continue;
      VehicleState& vs = state[a.vehicle];
      if (k == a.start_step) {
        a.record.started = true;
        switch (a.record.kind) {
          case StatementKind::Accelerate: a.record.effective = a.target_speed > vs.v; break;
          case StatementKind::Decelerate: a.record.effective = a.target_speed < vs.v; break;
          default:
            a.record.effective = a.target_lane != std::round(vs.lane) || a.target_speed != vs.v;
            if (a.target_lane != vs.lane) lateral[a.vehicle] = {true, k, vs.lane, a.target_lane};
            break;
        }
      }
      switch (a.record.kind) {
        case StatementKind::Accelerate:
          if (a.target_speed > vs.v) accel[a.vehicle] = std::min(phys.npc_accel, (a.target_speed - vs.v) / dt);
          break;
        case StatementKind::Decelerate:
          if (a.target_speed < vs.v) accel[a.vehicle] = -std::min(phys.npc_decel, (vs.v - a.target_speed) / dt);
          break;
        default:
          accel[a.vehicle] = toward(vs.v, a.target_speed, phys.npc_accel, phys.npc_decel, dt);
          break;
      }
    }

    // Ego: time-headway car following on its own lane.
    {
      const VehicleState& ego = state[0];
      double a = std::clamp(pol.speed_gain * (cruise - ego.v), -phys.accel_max, phys.accel_max);
      const VehicleState* leader = nullptr;
      for (std::size_t i = 1; i < state.size(); ++i) {
        const VehicleState& other = state[i];
        if (std::abs(other.lane - ego.lane) >= pol.perception_lane_tolerance || other.s <= ego.s) continue;
        if (!leader || other.s < leader->s) leader = &other;
      }
      if (leader) {
        const double gap = leader->s - ego.s - phys.vehicle_length;
        const double closing = ego.v - leader->v;
        const double h = pol.safe_time_headway;
        if (gap <= 0.0) {
          a = -pol.max_brake;
        } else {
          if (closing > 0.0) {
            const double ttc = gap / closing;
            if (ttc < 0.5 * h) {
              a = -pol.max_brake;
            } else if (ttc < h) {
              a = std::min(a, -pol.max_brake * (h - ttc) / (0.5 * h));
            }
          }
          if (gap < ego.v * h + pol.standstill_gap) a = std::min(a, 0.0);
        }
      }
      accel[0] = std::clamp(a, -std::min(pol.max_brake, phys.brake_max), phys.accel_max);
    }

    // Constant acceleration over the step with a speed floor at zero.
    for (std::size_t i = 0; i < state.size(); ++i) {
      VehicleState& vs = state[i];
      const double a = accel[i];
      const double v_next = vs.v + a * dt;
      if (v_next < 0.0) {
        const double t_stop = vs.v / -a;
        vs.s += 0.5 * vs.v * t_stop;
        vs.a = -vs.v / dt;
        vs.v = 0.0;
      } else {
        vs.s += vs.v * dt + 0.5 * a * dt * dt;
        vs.v = v_next;
        vs.a = a;
      }

      LateralManeuver& lat = lateral[i];
      lateral_rate[i] = 0.0;
      if (lat.active) {
        const double tau = static_cast<double>(k + 1 - lat.start_step) * dt;
        const double period = static_cast<double>(lc_steps) * dt;
        if (k + 1 - lat.start_step >= lc_steps) {
          vs.lane = lat.to;
          lat.active = false;
        } else {
          const double phase = std::numbers::pi * tau / period;
          vs.lane = lat.from + (lat.to - lat.from) * 0.5 * (1.0 - std::cos(phase));
          lateral_rate[i] = (lat.to - lat.from) * 0.5 * std::numbers::pi / period * std::sin(phase);
        }
      }
      double heading = std::atan2(lateral_rate[i] * trace.road.lane_width, vs.v);
      if (trace.road.shape == RoadShape::Curved) heading += vs.s / trace.road.radius;
      vs.heading = heading;
    }

    trace.steps.push_back(state);
    if (check_collision(static_cast<std::size_t>(k + 1))) break;
  }

  for (auto& a : actions) trace.actions.push_back(a.record);
  return trace;
}

std::optional<CollisionEvent> detect_collision(const SimTrace& trace, double threshold) {
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    const auto& row = trace.steps[k];
    double best = std::numeric_limits<double>::infinity();
    std::size_t who = 0;
    for (std::size_t i = 1; i < row.size(); ++i) {
      const double d = headway_distance(row[0], row[i], trace.road);
      if (d < best) {
        best = d;
        who = i;
      }
    }
    if (who != 0 && best < threshold) return CollisionEvent{trace.time(k), k, row[who].id};
  }
  return std::nullopt;
}

std::string trace_to_csv(const SimTrace& trace) {
  std::ostringstream out;
  out << "t,id,lane,s,v,a\n";
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    for (const auto& vs : trace.steps[k]) {
      out << text::format_double(trace.time(k)) << ',' << vs.id.str() << ',' << text::format_double(vs.lane) << ','
          << text::format_double(vs.s) << ',' << text::format_double(vs.v) << ',' << text::format_double(vs.a)
          << '\n';
    }
  }
  return out.str();
}

std::string trace_to_json(const SimTrace& trace) {
  nlohmann::json steps = nlohmann::json::array();
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& vs : trace.steps[k]) {
      row.push_back({{"id", vs.id.str()}, {"lane", vs.lane}, {"s", vs.s}, {"v", vs.v}, {"a", vs.a},
                     {"heading", vs.heading}});
    }
    steps.push_back({{"t", trace.time(k)}, {"vehicles", std::move(row)}});
  }
  nlohmann::json actions = nlohmann::json::array();
  for (const auto& a : trace.actions) {
    actions.push_back({{"vehicle", a.vehicle.str()}, {"call", statement_keyword(a.kind)}, {"start", a.start},
                       {"end", a.end}, {"started", a.started}, {"effective", a.effective}});
  }
  nlohmann::json j{{"dt", trace.dt},
                   {"horizon", trace.horizon},
                   {"ego", trace.ids.empty() ? "" : trace.ids.front().str()},
                   {"steps", std::move(steps)},
                   {"actions", std::move(actions)}};
  if (trace.collision) {
    j["collision"] = {{"t", trace.collision->time}, {"npc", trace.collision->npc.str()}};
  } else {
    j["collision"] = nullptr;
  }
  return j.dump();
}

}  // namespace scengen
