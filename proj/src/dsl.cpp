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

#include "scengen/dsl.hpp"

#include <array>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "scengen/error.hpp"
#include "text_util.hpp"

namespace scengen {

namespace {

constexpr std::array<ParamKind, 3> kConstructorParams{ParamKind::LaneId, ParamKind::LaneOffset,
                                                      ParamKind::InitialSpeed};
constexpr std::array<ParamKind, 2> kSpeedActionParams{ParamKind::TargetSpeed, ParamKind::TriggerSequence};
constexpr std::array<ParamKind, 3> kLaneChangeParams{ParamKind::TargetLane, ParamKind::TargetSpeed,
                                                     ParamKind::TriggerSequence};

bool is_integral(double v) { return std::isfinite(v) && std::floor(v) == v; }

struct Document {
  TestCaseTemplate tpl;
  std::optional<std::int64_t> seed;
};

// Splits "a, b=[1,2], c" at top-level commas.
std::vector<std::string_view> split_args(std::string_view s) {
  std::vector<std::string_view> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '[') ++depth;
    if (s[i] == ']') --depth;
    if (s[i] == ',' && depth == 0) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  out.push_back(s.substr(start));
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Document run() {
    Document doc;
    bool have_road = false;
    bool seen_action = false;
    std::set<VehicleId> declared;
    std::map<VehicleId, double> last_trigger;
    auto all = text::lines(text_);
    for (std::size_t n = 0; n < all.size(); ++n) {
      raw_ = all[n];
      line_no_ = n + 1;
      std::string_view line = text::trim(raw_);
      if (std::size_t hash = line.find('#'); hash != std::string_view::npos) {
        line = text::trim(line.substr(0, hash));
      }
      if (line.empty()) continue;

      std::size_t open = line.find('(');
      if (open == std::string_view::npos || line.back() != ')') fail(line, "expected call syntax name(...)");
      std::string_view name = text::trim(line.substr(0, open));
      std::string_view body = line.substr(open + 1, line.size() - open - 2);
      auto args = split_args(body);

      if (name == "road") {
        if (have_road) fail(name, "duplicate road statement");
        parse_road(args, doc.tpl.road);
        have_road = true;
        continue;
      }
      if (!have_road) fail(name, "first statement must be road(...)");
      if (name == "seed") {
        auto v = text::parse_long(body);
        if (!v) fail(body, "seed must be an integer");
        doc.seed = *v;
        continue;
      }

      Statement st;
      bool is_ego = false;
      if (name == "npc" || name == "ego") {
        st.kind = StatementKind::NpcConstructor;
        is_ego = name == "ego";
      } else if (name == "accelerate") {
        st.kind = StatementKind::Accelerate;
      } else if (name == "decelerate") {
        st.kind = StatementKind::Decelerate;
      } else if (name == "lane_change") {
        st.kind = StatementKind::LaneChange;
      } else {
        fail(name, "unknown statement '" + std::string(name) + "'");
      }

      std::string_view subject_text = text::trim(args.front());
      auto subject = VehicleId::parse(subject_text);
      if (!subject) fail(args.front(), "first argument must be a vehicle id");
      st.subject = *subject;

      auto kinds = param_kinds(st.kind);
      if (args.size() - 1 != kinds.size()) {
        throw ArityError(line_no_, text::column_of(raw_, name),
                         std::string(name) + " takes " + std::to_string(kinds.size()) +
                             " parameters, got " + std::to_string(args.size() - 1));
      }
      std::vector<std::optional<SlotState>> states(kinds.size());
      for (std::size_t a = 1; a < args.size(); ++a) {
        std::string_view arg = text::trim(args[a]);
        std::size_t eq = arg.find('=');
        if (eq == std::string_view::npos) fail(arg, "expected name=value");
        std::string_view key = text::trim(arg.substr(0, eq));
        std::size_t idx = kinds.size();
        for (std::size_t k = 0; k < kinds.size(); ++k) {
          if (param_name(kinds[k]) == key) idx = k;
        }
        if (idx == kinds.size()) fail(key, "unknown parameter '" + std::string(key) + "' for " + std::string(name));
        if (states[idx]) fail(key, "duplicate parameter '" + std::string(key) + "'");
        states[idx] = parse_state(text::trim(arg.substr(eq + 1)), kinds[idx]);
      }
      for (std::size_t k = 0; k < kinds.size(); ++k) st.params.push_back({kinds[k], *states[k]});

      if (st.is_constructor()) {
        if (seen_action) fail(name, "constructor after an action statement");
        if (!declared.insert(st.subject).second) fail(subject_text, "duplicate constructor for " + st.subject.str());
        if (is_ego) {
          if (doc.tpl.ego) fail(name, "more than one ego constructor");
          doc.tpl.ego = st.subject;
        }
      } else {
        seen_action = true;
        if (!declared.count(st.subject)) fail(subject_text, "undeclared subject " + st.subject.str());
        const SlotState& trig = st.params.back().state;
        if (const auto* b = std::get_if<Bound>(&trig)) {
          auto it = last_trigger.find(st.subject);
          if (it != last_trigger.end() && b->value <= it->second) {
            fail(args.back(), "trigger ordinals of " + st.subject.str() + " must be strictly increasing");
          }
          last_trigger[st.subject] = b->value;
        }
      }
      doc.tpl.statements.push_back(std::move(st));
    }
    if (!have_road) throw ParseError(all.size() + 1, 1, "missing road statement");
    return doc;
  }

 private:
  [[noreturn]] void fail(std::string_view at, const std::string& msg) const {
    throw ParseError(line_no_, text::column_of(raw_, at), msg);
  }

  void parse_road(const std::vector<std::string_view>& args, RoadDescriptor& road) const {
    if (args.size() != 2) fail(raw_, "road takes (shape, lanes=<n>)");
    auto shape = road_shape_from_name(args[0]);
    if (!shape) fail(args[0], "road shape must be straight or curved");
    std::string_view lanes = text::trim(args[1]);
    if (lanes.substr(0, 6) != "lanes=") fail(lanes, "expected lanes=<n>");
    auto count = text::parse_long(lanes.substr(6));
    if (!count || *count < 1 || *count > 64) fail(lanes, "lane count must be a positive integer");
    road = {*shape, static_cast<int>(*count)};
  }

  double number(std::string_view s) const {
    auto v = text::parse_double(s);
    if (!v || !std::isfinite(*v)) fail(s.empty() ? raw_ : s, "expected a number");
    return *v;
  }

  Range range(std::string_view s) const {
    // "[lo,hi]"
    if (s.size() < 2 || s.front() != '[' || s.back() != ']') fail(s, "expected [lo,hi]");
    std::string_view inner = s.substr(1, s.size() - 2);
    std::size_t comma = inner.find(',');
    if (comma == std::string_view::npos) fail(s, "expected [lo,hi]");
    Range r{number(inner.substr(0, comma)), number(inner.substr(comma + 1))};
    if (r.lo > r.hi) fail(s, "range lower bound exceeds upper bound");
    return r;
  }

  SlotState parse_state(std::string_view s, ParamKind kind) const {
    if (s == "?") return Unbound{};
    if (!s.empty() && s.front() == '[') return range(s);
    std::size_t in = s.find(" in ");
    Bound b;
    if (in != std::string_view::npos) {
      b.value = number(s.substr(0, in));
      b.range = range(text::trim(s.substr(in + 4)));
      if (!b.range->contains(b.value)) fail(s, "value outside its range");
    } else {
      b.value = number(s);
    }
    if (is_integer_param(kind) && !is_integral(b.value)) fail(s, "integer parameter has a fractional value");
    return b;
  }

  std::string_view text_;
  std::string_view raw_;
  std::size_t line_no_ = 0;
};

void write_state(std::ostream& out, const SlotState& state) {
  auto range = [&](const Range& r) {
    out << '[' << text::format_double(r.lo) << ',' << text::format_double(r.hi) << ']';
  };
  if (std::holds_alternative<Unbound>(state)) {
    out << '?';
  } else if (const auto* r = std::get_if<Range>(&state)) {
    range(*r);
  } else {
    const auto& b = std::get<Bound>(state);
    out << text::format_double(b.value);
    if (b.range) {
      out << " in ";
      range(*b.range);
    }
  }
}

std::string write(const TestCaseTemplate& tpl, std::optional<std::int64_t> seed) {
  std::ostringstream out;
  out << "road(" << road_shape_name(tpl.road.shape) << ", lanes=" << tpl.road.lane_count << ")\n";
  if (seed) out << "seed(" << *seed << ")\n";
  for (const auto& st : tpl.statements) {
    std::string_view kw = statement_keyword(st.kind);
    if (st.is_constructor() && tpl.ego == st.subject) kw = "ego";
    out << kw << '(' << st.subject.str();
    for (const auto& p : st.params) {
      out << ", " << param_name(p.kind) << '=';
      write_state(out, p.state);
    }
    out << ")\n";
  }
  return out.str();
}

}  // namespace

std::string_view statement_keyword(StatementKind kind) {
  switch (kind) {
    case StatementKind::NpcConstructor: return "npc";
    case StatementKind::Accelerate: return "accelerate";
    case StatementKind::Decelerate: return "decelerate";
    case StatementKind::LaneChange: return "lane_change";
  }
  return "";
}

std::string_view param_name(ParamKind kind) {
  switch (kind) {
    case ParamKind::LaneId:
    case ParamKind::TargetLane: return "lane";
    case ParamKind::LaneOffset: return "offset";
    case ParamKind::InitialSpeed:
    case ParamKind::TargetSpeed: return "speed";
    case ParamKind::TriggerSequence: return "trigger";
  }
  return "";
}

bool is_integer_param(ParamKind kind) {
  return kind == ParamKind::LaneId || kind == ParamKind::TargetLane || kind == ParamKind::TriggerSequence;
}

bool is_speed_param(ParamKind kind) {
  return kind == ParamKind::InitialSpeed || kind == ParamKind::TargetSpeed;
}

std::span<const ParamKind> param_kinds(StatementKind kind) {
  switch (kind) {
    case StatementKind::NpcConstructor: return kConstructorParams;
    case StatementKind::Accelerate:
    case StatementKind::Decelerate: return kSpeedActionParams;
    case StatementKind::LaneChange: return kLaneChangeParams;
  }
  return {};
}

std::size_t TestCaseTemplate::slot_count() const {
  std::size_t n = 0;
  for (const auto& st : statements) n += st.params.size();
  return n;
}

std::vector<VehicleId> TestCaseTemplate::vehicles() const {
  std::vector<VehicleId> out;
  for (const auto& st : statements) {
    if (st.is_constructor()) out.push_back(st.subject);
  }
  return out;
}

std::vector<VehicleId> TestCaseTemplate::npcs() const {
  std::vector<VehicleId> out;
  for (const auto& v : vehicles()) {
    if (v != ego) out.push_back(v);
  }
  return out;
}

bool same_structure(const TestCaseTemplate& a, const TestCaseTemplate& b) {
  if (a.road != b.road || a.ego != b.ego || a.statements.size() != b.statements.size()) return false;
  for (std::size_t i = 0; i < a.statements.size(); ++i) {
    const auto& x = a.statements[i];
    const auto& y = b.statements[i];
    if (x.kind != y.kind || x.subject != y.subject || x.params.size() != y.params.size()) return false;
    for (std::size_t p = 0; p < x.params.size(); ++p) {
      if (x.params[p].kind != y.params[p].kind) return false;
    }
  }
  return true;
}

std::vector<SlotRef> slot_refs(const TestCaseTemplate& tpl) {
  std::vector<SlotRef> out;
  for (std::size_t s = 0; s < tpl.statements.size(); ++s) {
    const auto& st = tpl.statements[s];
    for (std::size_t p = 0; p < st.params.size(); ++p) {
      out.push_back({s, p, st.kind, st.params[p].kind, st.subject});
    }
  }
  return out;
}

LogicalScenario::LogicalScenario(TestCaseTemplate tpl) : tpl_(std::move(tpl)) {
  slots_ = slot_refs(tpl_);
  std::size_t offset = 0;
  for (const auto& st : tpl_.statements) {
    offsets_.push_back(offset);
    offset += st.params.size();
  }
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    const auto& ref = slots_[i];
    const auto* r = std::get_if<Range>(&tpl_.statements[ref.statement].params[ref.param].state);
    if (!r) {
      throw InvalidTestCase("slot " + std::to_string(i) + " (" + ref.subject.str() + " " +
                            std::string(param_name(ref.kind)) + ") is not ranged");
    }
    if (is_integer_param(ref.kind) && std::ceil(r->lo) > std::floor(r->hi)) {
      throw InvalidTestCase("integer slot " + std::to_string(i) + " has no integer in its range");
    }
    ranges_.push_back(*r);
  }
}

TestCaseTemplate ConcreteTestCase::bound_template() const {
  TestCaseTemplate tpl = scenario->tpl();
  std::size_t i = 0;
  for (auto& st : tpl.statements) {
    for (auto& p : st.params) {
      p.state = Bound{values[i], scenario->range(i)};
      ++i;
    }
  }
  return tpl;
}

bool ConcreteTestCase::operator==(const ConcreteTestCase& other) const {
  if (values != other.values || seed_id != other.seed_id) return false;
  if (scenario == other.scenario) return true;
  return scenario && other.scenario && *scenario == *other.scenario;
}

TestCaseTemplate parse_template(std::string_view text) { return Parser(text).run().tpl; }

LogicalScenario parse_logical(std::string_view text) {
  Document doc = Parser(text).run();
  // Bare values in a logical scenario pin the slot to [v,v].
  for (auto& st : doc.tpl.statements) {
    for (auto& p : st.params) {
      if (const auto* b = std::get_if<Bound>(&p.state)) {
        if (b->range) throw ParseError(1, 1, "logical scenario slots must be ranges, not bound values");
        p.state = Range{b->value, b->value};
      }
    }
  }
  return LogicalScenario(std::move(doc.tpl));
}

ConcreteTestCase parse_concrete(std::string_view text) {
  Document doc = Parser(text).run();
  std::vector<double> values;
  for (auto& st : doc.tpl.statements) {
    for (auto& p : st.params) {
      const auto* b = std::get_if<Bound>(&p.state);
      if (!b) throw ParseError(1, 1, "concrete test case has an unbound or unvalued slot");
      values.push_back(b->value);
      p.state = b->range.value_or(Range{b->value, b->value});
    }
  }
  auto ls = std::make_shared<const LogicalScenario>(std::move(doc.tpl));
  return instantiate(ls, std::move(values), doc.seed.value_or(0));
}

std::string serialize_template(const TestCaseTemplate& tpl) { return write(tpl, std::nullopt); }

std::string serialize_logical(const LogicalScenario& ls) { return write(ls.tpl(), std::nullopt); }

std::string serialize_concrete(const ConcreteTestCase& tc) { return write(tc.bound_template(), tc.seed_id); }

ConcreteTestCase instantiate(const LogicalScenarioPtr& ls, std::vector<double> values, std::int64_t seed_id) {
  if (values.size() != ls->dimension()) {
    throw DimensionMismatch("assignment has " + std::to_string(values.size()) + " values, scenario has " +
                            std::to_string(ls->dimension()) + " slots");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Range& r = ls->range(i);
    if (!std::isfinite(values[i]) || !r.contains(values[i])) {
      throw OutOfRange(i, values[i],
                       "value " + text::format_double(values[i]) + " outside [" + text::format_double(r.lo) +
                           "," + text::format_double(r.hi) + "]");
    }
    if (ls->integer_slot(i) && !is_integral(values[i])) {
      throw OutOfRange(i, values[i], "non-integral value for an integer slot");
    }
  }
  return ConcreteTestCase{ls, std::move(values), seed_id};
}

bool ValidationReport::has(ValidationCode code) const {
  for (const auto& i : issues) {
    if (i.code == code) return true;
  }
  return false;
}

ValidationReport validate_concrete(const ConcreteTestCase& tc, const RoadDescriptor& road, double vehicle_length) {
  ValidationReport report;
  const auto& tpl = tc.scenario->tpl();
  struct Placed {
    std::size_t statement;
    VehicleId id;
    double lane;
    double offset;
  };
  std::vector<Placed> placed;
  std::map<VehicleId, double> last_trigger;

  for (std::size_t s = 0; s < tpl.statements.size(); ++s) {
    const auto& st = tpl.statements[s];
    for (std::size_t p = 0; p < st.params.size(); ++p) {
      const double v = tc.param(s, p);
      const ParamKind kind = st.params[p].kind;
      if ((kind == ParamKind::LaneId || kind == ParamKind::TargetLane) && (v < 1 || v > road.lane_count)) {
        report.issues.push_back({ValidationCode::LaneOutOfRoad, s,
                                 st.subject.str() + " lane " + text::format_double(v) + " outside 1.." +
                                     std::to_string(road.lane_count)});
      }
      if (is_speed_param(kind) && v < 0) {
        report.issues.push_back({ValidationCode::NegativeSpeed, s, st.subject.str() + " has a negative speed"});
      }
      if (kind == ParamKind::TriggerSequence) {
        auto it = last_trigger.find(st.subject);
        if (it != last_trigger.end() && v <= it->second) {
          report.issues.push_back({ValidationCode::TriggerOrder, s,
                                   st.subject.str() + " trigger ordinals are not strictly increasing"});
        }
        last_trigger[st.subject] = v;
      }
    }
    if (st.is_constructor()) placed.push_back({s, st.subject, tc.param(s, 0), tc.param(s, 1)});
  }

  for (std::size_t i = 0; i < placed.size(); ++i) {
    for (std::size_t j = i + 1; j < placed.size(); ++j) {
      if (placed[i].lane == placed[j].lane && std::abs(placed[i].offset - placed[j].offset) < vehicle_length) {
        report.issues.push_back({ValidationCode::LongitudinalOverlap, placed[j].statement,
                                 placed[i].id.str() + " and " + placed[j].id.str() +
                                     " start overlapping in lane " + text::format_double(placed[i].lane)});
      }
    }
  }
  return report;
}

std::string assignment_json(const ConcreteTestCase& tc) {
  nlohmann::json slots = nlohmann::json::array();
  const auto& ls = *tc.scenario;
  for (std::size_t i = 0; i < ls.dimension(); ++i) {
    const auto& ref = ls.slots()[i];
    slots.push_back({{"statement", ref.statement},
                     {"vehicle", ref.subject.str()},
                     {"call", statement_keyword(ref.statement_kind)},
                     {"param", param_name(ref.kind)},
                     {"value", tc.values[i]},
                     {"range", {ls.range(i).lo, ls.range(i).hi}}});
  }
  nlohmann::json j{{"seed_id", tc.seed_id}, {"values", tc.values}, {"slots", std::move(slots)}};
  return j.dump();
}

}  // namespace scengen
