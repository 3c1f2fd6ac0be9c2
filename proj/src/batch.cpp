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

#include "scengen/batch.hpp"

#include <exception>

#include <omp.h>

namespace scengen {

namespace {

Evaluation evaluate_one(const ConcreteTestCase& tc, std::span<const ParamPoint> reference, const SimConfig& sim,
                        const FitnessConfig& fitness) {
  auto trace = std::make_shared<SimTrace>(simulate(tc, sim));
  FitnessVector fv = evaluate(tc, *trace, reference, fitness);
  return {std::move(trace), fv};
}

}  // namespace

std::vector<Evaluation> evaluate_batch_serial(std::span<const ConcreteTestCase> cases,
                                              std::span<const ParamPoint> reference, const SimConfig& sim,
                                              const FitnessConfig& fitness) {
  std::vector<Evaluation> out;
  out.reserve(cases.size());
  for (const auto& tc : cases) out.push_back(evaluate_one(tc, reference, sim, fitness));
  return out;
}

std::vector<Evaluation> evaluate_batch(std::span<const ConcreteTestCase> cases, std::span<const ParamPoint> reference,
                                       const SimConfig& sim, const FitnessConfig& fitness, int jobs) {
  const long n = static_cast<long>(cases.size());
  std::vector<Evaluation> out(cases.size());
  std::vector<std::exception_ptr> errors(cases.size());
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();

  // Each slot is written by exactly one iteration, so no merge step is
  // needed and the order never depends on scheduling.
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long i = 0; i < n; ++i) {
    try {
      out[i] = evaluate_one(cases[i], reference, sim, fitness);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }

  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace scengen
