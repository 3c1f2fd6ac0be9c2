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

// Simulate-and-score for a whole generation. The OpenMP kernel and the
// serial reference must agree bit for bit; results are always returned in
// candidate order.

#ifndef SCENGEN_BATCH_HPP_
#define SCENGEN_BATCH_HPP_

#include <memory>
#include <span>
#include <vector>

#include "scengen/fitness.hpp"
#include "scengen/microsim.hpp"

namespace scengen {

struct Evaluation {
  std::shared_ptr<const SimTrace> trace;
  FitnessVector fv;
};

std::vector<Evaluation> evaluate_batch_serial(std::span<const ConcreteTestCase> cases,
                                              std::span<const ParamPoint> reference, const SimConfig& sim,
                                              const FitnessConfig& fitness);

/// `jobs` <= 0 uses the OpenMP default thread count. If several candidates
/// throw, the error of the lowest index is rethrown.
std::vector<Evaluation> evaluate_batch(std::span<const ConcreteTestCase> cases, std::span<const ParamPoint> reference,
                                       const SimConfig& sim, const FitnessConfig& fitness, int jobs);

}  // namespace scengen

#endif  // SCENGEN_BATCH_HPP_
