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

#include "scengen/ips.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>
#include <sstream>

#include "scengen/error.hpp"
#include "text_util.hpp"

namespace scengen {

namespace {

constexpr std::array<std::pair<ActionVerb, std::string_view>, 5> kVerbKeywords{{
    {ActionVerb::Brake, "brake"},
    {ActionVerb::Decelerate, "decelerate"},
    {ActionVerb::Accelerate, "accelerate"},
    {ActionVerb::SwerveLeft, "swerve left"},
    {ActionVerb::SwerveRight, "swerve right"},
}};

struct Word {
  std::string_view text;
  std::size_t offset;
};

std::vector<Word> split_words(std::string_view text) {
  std::vector<Word> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !std::isalnum(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && std::isalnum(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) words.push_back({text.substr(start, i - start), start});
  }
  return words;
}

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

}  // namespace

std::optional<VehicleId> VehicleId::parse(std::string_view text) {
  if (text.size() < 2 || text.front() != 'V') return std::nullopt;
  std::string_view digits = text.substr(1);
  if (digits.front() == '0') return std::nullopt;
  if (!std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    return std::nullopt;
  }
  auto value = text::parse_long(digits);
  if (!value || *value < 1 || *value > 1'000'000) return std::nullopt;
  return VehicleId{static_cast<int>(*value)};
}

std::string_view verb_keyword(ActionVerb verb) {
  for (const auto& [v, kw] : kVerbKeywords) {
    if (v == verb) return kw;
  }
  return "";
}

std::optional<ActionVerb> verb_from_keyword(std::string_view keyword) {
  for (const auto& [v, kw] : kVerbKeywords) {
    if (kw == keyword) return v;
  }
  return std::nullopt;
}

std::string_view road_shape_name(RoadShape shape) {
  return shape == RoadShape::Straight ? "straight" : "curved";
}

std::optional<RoadShape> road_shape_from_name(std::string_view name) {
  std::string n = text::lower(text::trim(name));
  if (n == "straight") return RoadShape::Straight;
  if (n == "curved") return RoadShape::Curved;
  return std::nullopt;
}

std::string_view rule_id(LegalityRule rule) {
  switch (rule) {
    case LegalityRule::R1_TwoVehicles: return "R1";
    case LegalityRule::R2_ClosedVerbSet: return "R2";
    case LegalityRule::R3_DeclaredVehicles: return "R3";
    case LegalityRule::R4_DistinctActorReactor: return "R4";
    case LegalityRule::R5_NonEmpty: return "R5";
  }
  return "R?";
}

bool LegalityReport::has(LegalityRule rule) const {
  return std::any_of(violations.begin(), violations.end(),
                     [rule](const LegalityViolation& v) { return v.rule == rule; });
}

std::vector<std::string> LegalityReport::lines() const {
  std::vector<std::string> out;
  out.reserve(violations.size());
  for (const auto& v : violations) {
    out.push_back(std::string(rule_id(v.rule)) + " " + v.location + ": " + v.message);
  }
  return out;
}

std::vector<DetectedVerb> detect_verbs(std::string_view text) {
  std::vector<DetectedVerb> found;
  std::vector<Word> words = split_words(text);
  std::optional<VehicleId> last_vehicle;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (auto id = VehicleId::parse(words[i].text)) {
      last_vehicle = id;
      continue;
    }
    std::string w = text::lower(words[i].text);
    std::optional<ActionVerb> verb;
    if (starts_with(w, "brak")) {
      verb = ActionVerb::Brake;
    } else if (starts_with(w, "decelerat")) {
      verb = ActionVerb::Decelerate;
    } else if (starts_with(w, "accelerat")) {
      verb = ActionVerb::Accelerate;
    } else if (starts_with(w, "swerv")) {
      // "swerves left", "swerved to the right"
      std::size_t j = i + 1;
      while (j < words.size()) {
        std::string next = text::lower(words[j].text);
        if (next == "to" || next == "the") {
          ++j;
          continue;
        }
        if (next == "left") verb = ActionVerb::SwerveLeft;
        if (next == "right") verb = ActionVerb::SwerveRight;
        break;
      }
    }
    if (verb) found.push_back({*verb, last_vehicle, words[i].offset});
  }
  return found;
}

Ips parse_ips(std::string_view input) {
  Ips ips;
  bool have_header = false;
  std::set<VehicleId> declared;
  auto all_lines = text::lines(input);
  for (std::size_t n = 0; n < all_lines.size(); ++n) {
    const std::string_view raw = all_lines[n];
    const std::size_t line_no = n + 1;
    std::string_view line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto fail = [&](std::string_view at, const std::string& msg) -> ParseError {
      return ParseError(line_no, text::column_of(raw, at), msg);
    };

    if (!have_header) {
      // road: <shape>, lanes: <n>
      std::string low = text::lower(line);
      if (!starts_with(low, "road:")) throw fail(line, "expected header 'road: <shape>, lanes: <n>'");
      std::size_t comma = line.find(',');
      if (comma == std::string_view::npos) throw fail(line, "header is missing ', lanes: <n>'");
      std::string_view shape_text = text::trim(line.substr(5, comma - 5));
      auto shape = road_shape_from_name(shape_text);
      if (!shape) throw fail(shape_text, "road shape must be 'straight' or 'curved'");
      std::string_view rest = text::trim(line.substr(comma + 1));
      if (!starts_with(text::lower(rest), "lanes:")) throw fail(rest, "expected 'lanes: <n>'");
      std::string_view count_text = text::trim(rest.substr(6));
      auto lanes = text::parse_long(count_text);
      if (!lanes || *lanes < 1 || *lanes > 64) throw fail(count_text, "lane count must be a positive integer");
      ips.road = {*shape, static_cast<int>(*lanes)};
      have_header = true;
      continue;
    }

    if (line.front() == '(') {
      std::size_t close = line.find(')');
      if (close == std::string_view::npos) throw fail(line, "unterminated vehicle tuple");
      std::string_view inner = line.substr(1, close - 1);
      InteractivePattern pattern;
      std::size_t pos = 0;
      while (pos <= inner.size()) {
        std::size_t comma = inner.find(',', pos);
        if (comma == std::string_view::npos) comma = inner.size();
        std::string_view item = text::trim(inner.substr(pos, comma - pos));
        auto id = VehicleId::parse(item);
        if (!id) throw fail(item.empty() ? inner : item, "expected a vehicle id like V1");
        pattern.vehicles.push_back(*id);
        pos = comma + 1;
      }
      if (pattern.vehicles.size() != 2) throw fail(line, "pattern must name exactly two vehicles");
      std::string_view after = line.substr(close + 1);
      std::string_view after_trim = text::trim(after);
      if (after_trim.empty() || after_trim.front() != ':') throw fail(after, "expected ':' after vehicle tuple");
      std::string_view desc = text::trim(after_trim.substr(1));
      if (desc.empty()) throw fail(after_trim, "pattern description is empty");
      pattern.description = std::string(desc);

      const VehicleId actor = pattern.vehicles[0];
      const VehicleId reactor = pattern.vehicles[1];
      for (const DetectedVerb& dv : detect_verbs(desc)) {
        VehicleId subject = dv.subject.value_or(actor);
        if (subject == actor && pattern.actor_verb.empty()) {
          pattern.actor_verb = std::string(verb_keyword(dv.verb));
        } else if (subject == reactor && reactor != actor && !pattern.reactor_verb) {
          pattern.reactor_verb = std::string(verb_keyword(dv.verb));
        }
      }
      if (pattern.actor_verb.empty()) {
        throw fail(desc, "no action verb (brake, decelerate, accelerate, swerve left/right) for " +
                             actor.str());
      }
      ips.patterns.push_back(std::move(pattern));
      continue;
    }

    std::size_t colon = line.find(':');
    if (colon != std::string_view::npos) {
      std::string_view id_text = text::trim(line.substr(0, colon));
      auto id = VehicleId::parse(id_text);
      if (!id) throw fail(line, "malformed statement");
      if (!ips.patterns.empty()) throw fail(line, "initial action after interactive patterns");
      if (!declared.insert(*id).second) throw fail(id_text, "duplicate initial action for " + id->str());
      std::string_view desc = text::trim(line.substr(colon + 1));
      if (desc.empty()) throw fail(line.substr(colon), "initial action description is empty");
      ips.initials.push_back({*id, std::string(desc)});
      continue;
    }
    throw fail(line, "malformed statement");
  }
  if (!have_header) throw ParseError(all_lines.size() + 1, 1, "missing road header");
  return ips;
}

std::string serialize_ips(const Ips& ips) {
  std::ostringstream out;
  out << "road: " << road_shape_name(ips.road.shape) << ", lanes: " << ips.road.lane_count << '\n';
  for (const auto& init : ips.initials) out << init.vehicle.str() << ": " << init.description << '\n';
  for (const auto& p : ips.patterns) {
    out << '(';
    for (std::size_t i = 0; i < p.vehicles.size(); ++i) {
      if (i) out << ", ";
      out << p.vehicles[i].str();
    }
    out << "): " << p.description << '\n';
  }
  return out.str();
}

LegalityReport check_legality(const Ips& ips) {
  LegalityReport report;
  auto add = [&](LegalityRule r, std::string loc, std::string msg) {
    report.violations.push_back({r, std::move(loc), std::move(msg)});
  };
  if (ips.initials.empty()) add(LegalityRule::R5_NonEmpty, "initials", "no initial actions");
  if (ips.patterns.empty()) add(LegalityRule::R5_NonEmpty, "patterns", "no interactive patterns");

  std::set<VehicleId> declared;
  for (const auto& init : ips.initials) declared.insert(init.vehicle);

  for (std::size_t i = 0; i < ips.patterns.size(); ++i) {
    const auto& p = ips.patterns[i];
    const std::string loc = "pattern " + std::to_string(i + 1);
    if (p.vehicles.size() != 2) {
      add(LegalityRule::R1_TwoVehicles, loc,
          "names " + std::to_string(p.vehicles.size()) + " vehicles, expected exactly two");
    }
    if (!verb_from_keyword(p.actor_verb)) {
      add(LegalityRule::R2_ClosedVerbSet, loc, "actor verb '" + p.actor_verb + "' is not allowed");
    }
    if (p.reactor_verb && !verb_from_keyword(*p.reactor_verb)) {
      add(LegalityRule::R2_ClosedVerbSet, loc, "reactor verb '" + *p.reactor_verb + "' is not allowed");
    }
    std::set<VehicleId> reported;
    for (const auto& v : p.vehicles) {
      if (!declared.count(v) && reported.insert(v).second) {
        add(LegalityRule::R3_DeclaredVehicles, loc, v.str() + " has no initial action");
      }
    }
    if (p.vehicles.size() >= 2 && p.vehicles[0] == p.vehicles[1]) {
      add(LegalityRule::R4_DistinctActorReactor, loc, "actor and reactor are both " + p.vehicles[0].str());
    }
  }
  return report;
}

}  // namespace scengen
