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
#include "scengen/batch.hpp"
#include "scengen/error.hpp"
#include "scengen/search.hpp"

namespace scengen {
namespace {

std::vector<ConcreteTestCase> random_cases(testing::Gen& g, std::size_t n) {
  std::vector<ConcreteTestCase> out;
  auto ls = testing::random_sim_scenario(g);
  Rng rng(g());
  while (out.size() < n) out.push_back(sample_case(ls, rng, 1000, 4.5));
  return out;
}

TEST(Batch, ParallelMatchesSerial) {
  testing::Gen g(17);
  for (int rep = 0; rep < 10; ++rep) {
    auto cases = random_cases(g, 16);
    std::vector<ParamPoint> reference;
    for (const auto& c : cases) reference.push_back(normalize(c));
    const auto serial = evaluate_batch_serial(cases, reference, SimConfig{}, FitnessConfig{});
    for (int jobs : {1, 2, 4, 0}) {
      const auto parallel = evaluate_batch(cases, reference, SimConfig{}, FitnessConfig{}, jobs);
      ASSERT_EQ(parallel.size(), serial.size());
      for (std::size_t i = 0; i < serial.size(); ++i) {
        EXPECT_EQ(parallel[i].fv, serial[i].fv) << "jobs=" << jobs << " case " << i;
        EXPECT_EQ(parallel[i].trace->steps, serial[i].trace->steps);
        EXPECT_EQ(parallel[i].trace->collision, serial[i].trace->collision);
      }
    }
  }
}

TEST(Batch, EmptyInput) {
  EXPECT_TRUE(evaluate_batch({}, {}, SimConfig{}, FitnessConfig{}, 4).empty());
}

TEST(Batch, RethrowsLowestIndexFailure) {
  testing::Gen g(2);
  auto cases = random_cases(g, 6);
  std::vector<ParamPoint> reference{normalize(cases[0])};
  // Case 2 starts with overlapping vehicles, case 4 has no NPC at all.
  auto ls = std::make_shared<const LogicalScenario>(parse_logical(
      "road(straight, lanes=1)\nego(V1, lane=1, offset=[0,9], speed=5)\nnpc(V2, lane=1, offset=[0,9], speed=5)\n"));
  cases[2] = instantiate(ls, {1, 0, 5, 1, 1, 5});
  auto alone = std::make_shared<const LogicalScenario>(parse_logical("road(straight, lanes=1)\nego(V1, lane=1, offset=0, speed=5)\n"));
  cases[4] = instantiate(alone, {1, 0, 5});
  try {
    evaluate_batch(cases, reference, SimConfig{}, FitnessConfig{}, 3);
    FAIL();
  } catch (const InvalidTestCase&) {
  }
  try {
    evaluate_batch_serial(cases, reference, SimConfig{}, FitnessConfig{});
    FAIL();
  } catch (const InvalidTestCase&) {
  }
}

}  // namespace
}  // namespace scengen
