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

// The three search objectives: minimum headway distance (criticality,
// minimized), acceleration change rate (interactivity, maximized) and mean
// pairwise parameter distance (diversity, maximized).

#ifndef SCENGEN_FITNESS_HPP_
#define SCENGEN_FITNESS_HPP_

#include <array>
#include <span>
#include <vector>

#include "scengen/dsl.hpp"
#include "scengen/microsim.hpp"

namespace scengen {

enum class Direction { Minimize, Maximize };

struct FitnessVector {
  double mhd = 0.0;
  double acr = 0.0;
  double div = 0.0;

  static constexpr std::array<Direction, 3> kDirections{Direction::Minimize, Direction::Maximize,
                                                        Direction::Maximize};
  double operator[](std::size_t i) const { return i == 0 ? mhd : (i == 1 ? acr : div); }
  bool operator==(const FitnessVector&) const = default;
};

/// Pareto dominance under the fixed directions (min, max, max).
bool dominates(const FitnessVector& a, const FitnessVector& b);

struct FitnessConfig {
  /// Acceleration threshold of the ACR indicator (m/s^2).
  double eta = 1.0;
  /// Measure diversity against every case evaluated so far instead of the
  /// current generation only.
  bool archive_div = false;
};

/// Assignment mapped into [0,1]^d by the logical ranges; degenerate ranges
/// map to 0.
using ParamPoint = std::vector<double>;
ParamPoint normalize(const ConcreteTestCase& tc);

/// Minimum Euclidean distance between ego and NPC headway positions over the
/// whole trace. Throws NoNpc.
double mhd(const SimTrace& trace);

/// A stationary sample of a discrete signal: a plateau (consecutive equal
/// samples, merged into one point) or a strict local extremum.
struct StationaryPoint {
  std::size_t first_step;
  double value;
};
std::vector<StationaryPoint> stationary_points(std::span<const double> signal, double tolerance = 1e-9);

/// Pairs (t1 < t2) of stationary points of the ego acceleration whose values
/// differ by at least `eta`, divided by the trace duration. Throws
/// TraceTooShort for fewer than three steps.
double acr(const SimTrace& trace, double eta);
/// Same on a raw acceleration series sampled every `dt`.
double acr_series(std::span<const double> accel, double dt, double eta);

/// Mean Euclidean distance over unordered pairs; 0 for a single point.
/// Throws DimensionMismatch on unequal dimensions or an empty set.
double div(std::span<const ParamPoint> points);

/// (mhd(trace), acr(trace, eta), div(population ∪ {point of tc})).
FitnessVector evaluate(const ConcreteTestCase& tc, const SimTrace& trace, std::span<const ParamPoint> population,
                       const FitnessConfig& cfg);

}  // namespace scengen

#endif  // SCENGEN_FITNESS_HPP_
