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

// Serial reference against the OpenMP batch evaluator on one generation's
// worth of candidates (simulation + fitness).
//
//   bench_evaluate --benchmark_counter_tabular=true

#include <benchmark/benchmark.h>

#include <memory>

#include "scengen/batch.hpp"
#include "scengen/search.hpp"

namespace {

using namespace scengen;

std::vector<ConcreteTestCase> make_cases(std::size_t n) {
  auto ls = std::make_shared<const LogicalScenario>(parse_logical(
      "road(curved, lanes=3)\n"
      "ego(V1, lane=1, offset=0, speed=[8,16])\n"
      "npc(V2, lane=2, offset=[5,40], speed=[4,14])\n"
      "npc(V3, lane=3, offset=[0,60], speed=[4,14])\n"
      "lane_change(V2, lane=1, speed=[4,14], trigger=1)\n"
      "decelerate(V2, speed=[0,6], trigger=2)\n"
      "lane_change(V3, lane=[1,2], speed=[4,14], trigger=1)\n"));
  Rng rng(42);
  return initial_population(ls, n, rng, 1000, kDefaultVehicleLength);
}

void BM_Serial(benchmark::State& state) {
  const auto cases = make_cases(static_cast<std::size_t>(state.range(0)));
  std::vector<ParamPoint> reference;
  for (const auto& c : cases) reference.push_back(normalize(c));
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate_batch_serial(cases, reference, SimConfig{}, FitnessConfig{}));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_OpenMP(benchmark::State& state) {
  const auto cases = make_cases(static_cast<std::size_t>(state.range(0)));
  std::vector<ParamPoint> reference;
  for (const auto& c : cases) reference.push_back(normalize(c));
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate_batch(cases, reference, SimConfig{}, FitnessConfig{}, 0));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK(BM_Serial)->Arg(8)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OpenMP)->Arg(8)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
