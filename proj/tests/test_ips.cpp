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

#include "generators.hpp"
#include "scengen/error.hpp"
#include "scengen/ips.hpp"

namespace scengen {
namespace {

constexpr const char* kThreeVehicles =
    "road: straight, lanes: 3\n"
    "V1: drives in lane 1 behind V2.\n"
    "V2: drives in lane 2 ahead of V1.\n"
    "V3: drives in lane 3.\n"
    "(V1, V2): V1 swerves left to overtake V2 and strikes V2, V2 brakes.\n"
    "(V2, V3): V2 swerves left and hits V3.\n";

TEST(VehicleId, ParsesOnlyCanonicalForm) {
  EXPECT_EQ(VehicleId::parse("V1")->index, 1);
  EXPECT_EQ(VehicleId::parse("V12")->index, 12);
  EXPECT_FALSE(VehicleId::parse("V0"));
  EXPECT_FALSE(VehicleId::parse("v1"));
  EXPECT_FALSE(VehicleId::parse("V"));
  EXPECT_FALSE(VehicleId::parse("V1a"));
  EXPECT_FALSE(VehicleId::parse(" V1"));
}

TEST(Verbs, KeywordsRoundTrip) {
  for (ActionVerb v : {ActionVerb::Brake, ActionVerb::Decelerate, ActionVerb::Accelerate, ActionVerb::SwerveLeft,
                       ActionVerb::SwerveRight}) {
    EXPECT_EQ(verb_from_keyword(verb_keyword(v)), v);
  }
  EXPECT_FALSE(verb_from_keyword("stop"));
  EXPECT_FALSE(verb_from_keyword("swerve"));
}

TEST(DetectVerbs, AttributesToPrecedingVehicle) {
  auto found = detect_verbs("V1 swerves to the left and strikes V2, V2 Braking hard");
  ASSERT_EQ(found.size(), 2u);
  EXPECT_EQ(found[0].verb, ActionVerb::SwerveLeft);
  EXPECT_EQ(found[0].subject, VehicleId{1});
  EXPECT_EQ(found[1].verb, ActionVerb::Brake);
  EXPECT_EQ(found[1].subject, VehicleId{2});
}

TEST(DetectVerbs, NoSubjectBeforeFirstMention) {
  auto found = detect_verbs("accelerating past V3");
  ASSERT_EQ(found.size(), 1u);
  EXPECT_FALSE(found[0].subject);
}

TEST(ParseIps, WorkedExample) {
  Ips ips = parse_ips(kThreeVehicles);
  EXPECT_EQ(ips.road, (RoadDescriptor{RoadShape::Straight, 3}));
  ASSERT_EQ(ips.initials.size(), 3u);
  ASSERT_EQ(ips.patterns.size(), 2u);
  EXPECT_EQ(ips.patterns[0].actor(), VehicleId{1});
  EXPECT_EQ(ips.patterns[0].reactor(), VehicleId{2});
  EXPECT_EQ(ips.patterns[0].actor_verb, "swerve left");
  EXPECT_EQ(ips.patterns[0].reactor_verb, "brake");
  EXPECT_EQ(ips.patterns[1].actor_verb, "swerve left");
  EXPECT_FALSE(ips.patterns[1].reactor_verb);
  EXPECT_TRUE(check_legality(ips).ok());
}

TEST(ParseIps, CommentsAndBlankLinesIgnored) {
  Ips a = parse_ips(kThreeVehicles);
  Ips b = parse_ips(std::string("# header comment\n\n") + kThreeVehicles + "\n# trailing\n");
  EXPECT_EQ(a, b);
}

TEST(ParseIps, ErrorsCarryPosition) {
  try {
    parse_ips("road: straight, lanes: 2\nV1: drives.\n(V1, V2, V3): V1 brakes.\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.column(), 1u);
  }
  try {
    parse_ips("road: straight, lanes: 2\nV1: drives.\nV2: drives.\n(V1, V2): V1 stops near V2.\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
    EXPECT_EQ(e.column(), 11u);
  }
}

TEST(ParseIps, RejectsMalformedInput) {
  EXPECT_THROW(parse_ips(""), ParseError);
  EXPECT_THROW(parse_ips("road: highway, lanes: 2\n"), ParseError);
  EXPECT_THROW(parse_ips("road: straight, lanes: 0\n"), ParseError);
  EXPECT_THROW(parse_ips("road: straight\n"), ParseError);
  EXPECT_THROW(parse_ips("road: straight, lanes: 2\nV1: a.\nV1: b.\n"), ParseError);
  EXPECT_THROW(parse_ips("road: straight, lanes: 2\nV1: a.\n(V1, V2): V1 brakes.\nV2: late.\n"), ParseError);
  EXPECT_THROW(parse_ips("road: straight, lanes: 2\nV1:\n"), ParseError);
  EXPECT_THROW(parse_ips("road: straight, lanes: 2\nCar: a.\n"), ParseError);
}

TEST(Serialize, RoundTripsWorkedExample) {
  Ips ips = parse_ips(kThreeVehicles);
  EXPECT_EQ(serialize_ips(ips), kThreeVehicles);
  EXPECT_EQ(parse_ips(serialize_ips(ips)), ips);
}

TEST(Serialize, RoundTripsGeneratedIps) {
  testing::Gen g(11);
  for (int i = 0; i < 200; ++i) {
    Ips ips = testing::random_legal_ips(g);
    ASSERT_TRUE(check_legality(ips).ok()) << serialize_ips(ips);
    ASSERT_EQ(parse_ips(serialize_ips(ips)), ips) << serialize_ips(ips);
  }
}

TEST(Legality, EachRuleFires) {
  const Ips legal = parse_ips(kThreeVehicles);

  Ips r1 = legal;
  r1.patterns[0].vehicles.push_back(VehicleId{3});
  EXPECT_TRUE(check_legality(r1).has(LegalityRule::R1_TwoVehicles));

  Ips r2 = legal;
  r2.patterns[1].reactor_verb = "stops";
  EXPECT_TRUE(check_legality(r2).has(LegalityRule::R2_ClosedVerbSet));

  Ips r3 = legal;
  r3.initials.pop_back();
  EXPECT_TRUE(check_legality(r3).has(LegalityRule::R3_DeclaredVehicles));

  Ips r4 = legal;
  r4.patterns[1].vehicles[1] = VehicleId{2};
  EXPECT_TRUE(check_legality(r4).has(LegalityRule::R4_DistinctActorReactor));

  Ips r5 = legal;
  r5.patterns.clear();
  auto rep = check_legality(r5);
  ASSERT_EQ(rep.violations.size(), 1u);
  EXPECT_EQ(rep.violations[0].rule, LegalityRule::R5_NonEmpty);
  EXPECT_EQ(rep.lines()[0], "R5 patterns: no interactive patterns");
}

TEST(Legality, UndeclaredVehicleReportedOncePerPattern) {
  Ips ips = parse_ips(kThreeVehicles);
  ips.patterns[0].vehicles = {VehicleId{7}, VehicleId{7}};
  auto rep = check_legality(ips);
  int r3 = 0;
  for (const auto& v : rep.violations) r3 += v.rule == LegalityRule::R3_DeclaredVehicles;
  EXPECT_EQ(r3, 1);
  EXPECT_TRUE(rep.has(LegalityRule::R4_DistinctActorReactor));
}

}  // namespace
}  // namespace scengen
