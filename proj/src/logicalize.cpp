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

#include "scengen/logicalize.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "scengen/error.hpp"

namespace scengen {

namespace {

constexpr StatementKind kAllKinds[] = {StatementKind::NpcConstructor, StatementKind::Accelerate,
                                       StatementKind::Decelerate, StatementKind::LaneChange};

std::optional<StatementKind> kind_from_keyword(const std::string& kw) {
  for (StatementKind k : kAllKinds) {
    if (statement_keyword(k) == kw) return k;
  }
  return std::nullopt;
}

std::string slot_label(const SlotRef& ref) {
  return ref.subject.str() + "." + std::string(statement_keyword(ref.statement_kind)) + "." +
         std::string(param_name(ref.kind));
}

// Why `r` is unacceptable for `ref` given its default; empty when fine.
std::string screen_proposal(const SlotRef& ref, const Range& r, const Range& def, const RoadDescriptor& road) {
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi) return "malformed range";
  if (is_speed_param(ref.kind) && r.lo < 0) return "negative speed";
  if ((ref.kind == ParamKind::LaneId || ref.kind == ParamKind::TargetLane) &&
      (r.lo < 1 || r.hi > road.lane_count)) {
    return "lane outside the road";
  }
  if (is_integer_param(ref.kind) && std::ceil(r.lo) > std::floor(r.hi)) return "no integer in range";
  if (!r.subset_of(def)) return "not within the default range";
  return {};
}

bool ranges_intersect(const Range& a, const Range& b) { return a.lo <= b.hi && b.lo <= a.hi; }

}  // namespace

DefaultRangeTable DefaultRangeTable::builtin() {
  DefaultRangeTable t;
  const Range speed_initial{0, 20};
  const Range speed_target{0, 25};
  const Range trigger{1, 4};
  t.set(StatementKind::NpcConstructor, ParamKind::LaneId, {{}, true});
  t.set(StatementKind::NpcConstructor, ParamKind::LaneOffset, {{0, 80}, false});
  t.set(StatementKind::NpcConstructor, ParamKind::InitialSpeed, {speed_initial, false});
  for (StatementKind k : {StatementKind::Accelerate, StatementKind::Decelerate, StatementKind::LaneChange}) {
    t.set(k, ParamKind::TargetSpeed, {speed_target, false});
    t.set(k, ParamKind::TriggerSequence, {trigger, false});
  }
  t.set(StatementKind::LaneChange, ParamKind::TargetLane, {{}, true});
  return t;
}

DefaultRangeTable DefaultRangeTable::from_json(const std::string& text) {
  DefaultRangeTable t;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("default range table: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("default range table must be a JSON object");
  for (const auto& [call, params] : j.items()) {
    auto kind = kind_from_keyword(call);
    if (!kind) throw ConfigError("default range table: unknown call '" + call + "'");
    for (const auto& [name, value] : params.items()) {
      std::optional<ParamKind> param;
      for (ParamKind pk : param_kinds(*kind)) {
        if (param_name(pk) == name) param = pk;
      }
      if (!param) throw ConfigError("default range table: " + call + " has no parameter '" + name + "'");
      Entry e;
      if (value.is_string() && value.get<std::string>() == "road") {
        if (!is_integer_param(*param) || *param == ParamKind::TriggerSequence) {
          throw ConfigError("default range table: only lanes may be road-derived");
        }
        e.road_lanes = true;
      } else if (value.is_array() && value.size() == 2 && value[0].is_number() && value[1].is_number()) {
        e.range = {value[0].get<double>(), value[1].get<double>()};
        if (!(e.range.lo <= e.range.hi)) throw ConfigError("default range table: " + call + "." + name + " has lo > hi");
        if (is_speed_param(*param) && e.range.lo < 0) {
          throw ConfigError("default range table: " + call + "." + name + " allows negative speed");
        }
      } else {
        throw ConfigError("default range table: " + call + "." + name + " must be [lo,hi] or \"road\"");
      }
      t.set(*kind, *param, e);
    }
  }
  return t;
}

DefaultRangeTable DefaultRangeTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open default range table " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::string DefaultRangeTable::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [key, e] : entries_) {
    auto& slot = j[std::string(statement_keyword(key.first))][std::string(param_name(key.second))];
    if (e.road_lanes) {
      slot = "road";
    } else {
      slot = {e.range.lo, e.range.hi};
    }
  }
  return j.dump(2);
}

Range DefaultRangeTable::lookup(StatementKind kind, ParamKind param, const RoadDescriptor& road) const {
  auto it = entries_.find({kind, param});
  if (it == entries_.end()) {
    throw MissingDefault("no default range for " + std::string(statement_keyword(kind)) + "." +
                         std::string(param_name(param)));
  }
  if (it->second.road_lanes) return {1.0, static_cast<double>(road.lane_count)};
  return it->second.range;
}

LogicalScenario fill_ranges(const TestCaseTemplate& tpl, const ProposedRanges& proposed,
                            const DefaultRangeTable& defaults, double vehicle_length,
                            std::vector<RangeDecision>* decisions) {
  const auto refs = slot_refs(tpl);

  // Position of each action among its vehicle's actions, for staggering.
  std::map<VehicleId, int> action_total;
  std::vector<int> action_rank(tpl.statements.size(), 0);
  for (std::size_t s = 0; s < tpl.statements.size(); ++s) {
    const auto& st = tpl.statements[s];
    if (!st.is_constructor()) action_rank[s] = ++action_total[st.subject];
  }

  std::vector<Range> defaults_for(refs.size());
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const auto& ref = refs[i];
    Range def = defaults.lookup(ref.statement_kind, ref.kind, tpl.road);
    if (ref.kind == ParamKind::TriggerSequence) {
      const int k = action_rank[ref.statement];
      const int m = action_total[ref.subject];
      const double lo = std::ceil(def.lo) + (k - 1);
      def = {lo, std::max(lo, std::floor(def.hi) - (m - k))};
    }
    defaults_for[i] = def;
  }

  std::vector<RangeDecision> out(refs.size());
  for (std::size_t i = 0; i < refs.size(); ++i) {
    out[i] = {i, RangeSource::Default, defaults_for[i], {}};
    auto it = proposed.find(i);
    if (it == proposed.end()) continue;
    std::string why = screen_proposal(refs[i], it->second, defaults_for[i], tpl.road);
    if (why.empty()) {
      out[i] = {i, RangeSource::Proposed, it->second, {}};
    } else {
      out[i].reason = slot_label(refs[i]) + ": " + why;
    }
  }

  // Proposed start positions of vehicles that may share a lane must keep a
  // vehicle length apart, otherwise the run could start in a collision.
  struct Ctor {
    std::size_t lane_slot;
    std::size_t offset_slot;
  };
  std::vector<Ctor> ctors;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (refs[i].statement_kind == StatementKind::NpcConstructor && refs[i].kind == ParamKind::LaneId) {
      ctors.push_back({i, i + 1});
    }
  }
  std::vector<bool> revert(refs.size(), false);
  for (std::size_t a = 0; a < ctors.size(); ++a) {
    for (std::size_t b = a + 1; b < ctors.size(); ++b) {
      const auto& oa = out[ctors[a].offset_slot];
      const auto& ob = out[ctors[b].offset_slot];
      if (oa.source != RangeSource::Proposed || ob.source != RangeSource::Proposed) continue;
      if (!ranges_intersect(out[ctors[a].lane_slot].range, out[ctors[b].lane_slot].range)) continue;
      const bool separated = oa.range.hi + vehicle_length <= ob.range.lo || ob.range.hi + vehicle_length <= oa.range.lo;
      if (!separated) revert[ctors[a].offset_slot] = revert[ctors[b].offset_slot] = true;
    }
  }
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (!revert[i]) continue;
    out[i].source = RangeSource::Default;
    out[i].range = defaults_for[i];
    out[i].reason = slot_label(refs[i]) + ": start positions may overlap another vehicle";
  }

  TestCaseTemplate filled = tpl;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    filled.statements[refs[i].statement].params[refs[i].param].state = out[i].range;
  }
  if (decisions) *decisions = std::move(out);
  return LogicalScenario(std::move(filled));
}

EgoAssignment select_ego(const Ips& ips) {
  EgoAssignment result;
  for (const auto& init : ips.initials) result.active_counts[init.vehicle] = 0;
  for (const auto& p : ips.patterns) {
    for (const auto& v : p.vehicles) result.active_counts.try_emplace(v, 0);
    if (!p.vehicles.empty()) ++result.active_counts[p.vehicles.front()];
  }
  if (result.active_counts.empty()) throw UnknownEgo("IPS has no vehicles");
  // std::map iterates in ascending id order, so the first minimum wins ties.
  auto best = result.active_counts.begin();
  for (auto it = result.active_counts.begin(); it != result.active_counts.end(); ++it) {
    if (it->second < best->second) best = it;
  }
  result.ego = best->first;
  return result;
}

LogicalScenario substitute_ego(const LogicalScenario& ls, VehicleId ego) {
  TestCaseTemplate tpl = ls.tpl();
  auto has_ctor = std::any_of(tpl.statements.begin(), tpl.statements.end(),
                              [&](const Statement& st) { return st.is_constructor() && st.subject == ego; });
  if (!has_ctor) throw UnknownEgo(ego.str() + " has no constructor in the scenario");
  std::erase_if(tpl.statements, [&](const Statement& st) { return !st.is_constructor() && st.subject == ego; });
  tpl.ego = ego;
  return LogicalScenario(std::move(tpl));
}

}  // namespace scengen
