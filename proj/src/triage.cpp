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

#include "scengen/triage.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "scengen/error.hpp"

namespace scengen {

std::string_view geometry_name(CollisionGeometry g) {
  switch (g) {
    case CollisionGeometry::RearEnd: return "rear_end";
    case CollisionGeometry::LaneChangeSideswipe: return "lane_change_sideswipe";
    case CollisionGeometry::CutInFrontal: return "cut_in_frontal";
  }
  return "?";
}

std::string TypeSignature::key() const {
  std::string out = std::string(road_shape_name(road)) + "|" + std::to_string(npc_count) + "|";
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (i) out += ',';
    out += actions[i].role == VehicleRole::Collider ? "collider:" : "npc:";
    out += statement_keyword(actions[i].kind);
  }
  out += "|";
  out += geometry_name(geometry);
  return out;
}

TypeSignature classify(const SimTrace& trace, const TriageConfig& cfg) {
  if (!trace.collision) throw NotCritical();
  const auto& hit = *trace.collision;
  const double tc = hit.time;

  TypeSignature sig;
  sig.road = trace.road.shape;
  sig.npc_count = static_cast<int>(trace.npc_count());

  std::vector<const ActionRecord*> window;
  for (const auto& a : trace.actions) {
    if (!a.started || !a.effective) continue;
    if (a.start > tc || a.end < tc - cfg.window) continue;
    window.push_back(&a);
  }
  std::stable_sort(window.begin(), window.end(), [](const ActionRecord* x, const ActionRecord* y) {
    if (x->start != y->start) return x->start < y->start;
    return x->vehicle < y->vehicle;
  });
  for (const auto* a : window) {
    sig.actions.push_back({a->vehicle == hit.npc ? VehicleRole::Collider : VehicleRole::Other, a->kind});
  }

  const auto& row = trace.steps.at(hit.step);
  const auto npc = std::find_if(row.begin(), row.end(), [&](const VehicleState& s) { return s.id == hit.npc; });
  if (npc == row.end()) throw Error("collision partner missing from the trace");
  const VehicleState& ego = row.front();
  if (std::abs(npc->lane - ego.lane) < cfg.rear_end_lane_tolerance) {
    sig.geometry = CollisionGeometry::RearEnd;
  } else if (npc->s - ego.s >= 0.5 * trace.vehicle_length) {
    sig.geometry = CollisionGeometry::CutInFrontal;
  } else {
    sig.geometry = CollisionGeometry::LaneChangeSideswipe;
  }
  return sig;
}

TypeSignature classify(const EvaluatedCase& evaluated, const TriageConfig& cfg) {
  if (!evaluated.trace) throw NotCritical();
  return classify(*evaluated.trace, cfg);
}

std::size_t distinct_types(const RepetitionOutcome& outcome) {
  std::set<TypeSignature> seen;
  for (const auto& [sim, sig] : outcome.criticals) seen.insert(sig);
  return seen.size();
}

std::vector<std::size_t> cumulative_types(const RepetitionOutcome& outcome) {
  std::vector<std::size_t> out(outcome.simulations, 0);
  std::set<TypeSignature> seen;
  std::size_t next = 0;
  auto crit = outcome.criticals;
  std::stable_sort(crit.begin(), crit.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t s = 1; s <= outcome.simulations; ++s) {
    while (next < crit.size() && crit[next].first <= s) seen.insert(crit[next++].second);
    out[s - 1] = seen.size();
  }
  return out;
}

std::map<std::string, std::size_t> type_counts(const std::vector<RepetitionOutcome>& outcomes) {
  std::map<std::string, std::size_t> out;
  for (const auto& o : outcomes) {
    for (const auto& [sim, sig] : o.criticals) ++out[sig.key()];
  }
  return out;
}

namespace {

Stat summarize(const std::vector<std::optional<double>>& xs) {
  Stat s;
  double sum = 0.0;
  for (const auto& x : xs) {
    if (!x) continue;
    sum += *x;
    ++s.defined;
  }
  if (s.defined == 0) return s;
  s.mean = sum / static_cast<double>(s.defined);
  double sq = 0.0;
  for (const auto& x : xs) {
    if (x) sq += (*x - s.mean) * (*x - s.mean);
  }
  s.std = std::sqrt(sq / static_cast<double>(s.defined));
  return s;
}

nlohmann::json stat_json(const Stat& s) {
  if (!s.reached()) return "not reached";
  return {{"mean", s.mean}, {"std", s.std}, {"defined", s.defined}};
}

}  // namespace

CampaignMetrics metrics(const std::vector<RepetitionOutcome>& repetitions) {
  if (repetitions.empty()) throw EmptyHistory();
  CampaignMetrics m;
  m.repetitions = repetitions.size();
  std::vector<std::optional<double>> types, rate, first, all, time;
  for (const auto& rep : repetitions) {
    std::set<TypeSignature> seen;
    std::optional<double> first_at, all_at;
    for (const auto& [sim, sig] : rep.criticals) {
      if (sim == 0 || sim > rep.simulations) throw Error("critical simulation index outside the repetition");
      if (seen.insert(sig).second) {
        if (!first_at) first_at = static_cast<double>(sim);
        all_at = static_cast<double>(sim);
      }
    }
    types.push_back(static_cast<double>(seen.size()));
    if (rep.criticals.empty()) {
      rate.push_back(0.0);
      m.rate_undefined = true;
    } else {
      rate.push_back(static_cast<double>(seen.size()) / static_cast<double>(rep.criticals.size()));
    }
    first.push_back(first_at);
    all.push_back(all_at);
    if (rep.simulations > 0) time.push_back(rep.wall_seconds / static_cast<double>(rep.simulations));
  }
  m.n_types = summarize(types);
  m.type_expos_rate = summarize(rate);
  m.sim_for_first_type = summarize(first);
  m.sim_for_all_types = summarize(all);
  m.time_for_one_scenario = summarize(time);
  return m;
}

std::string metrics_json(const CampaignMetrics& m) {
  nlohmann::ordered_json j;
  j["repetitions"] = m.repetitions;
  j["n_types"] = stat_json(m.n_types);
  j["type_expos_rate"] = stat_json(m.type_expos_rate);
  j["rate_undefined"] = m.rate_undefined;
  j["sim_for_first_type"] = stat_json(m.sim_for_first_type);
  j["sim_for_all_types"] = stat_json(m.sim_for_all_types);
  j["time_for_one_scenario"] = stat_json(m.time_for_one_scenario);
  return j.dump(2);
}

}  // namespace scengen
