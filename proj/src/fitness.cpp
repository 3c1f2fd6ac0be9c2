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

#include "scengen/fitness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "scengen/error.hpp"

namespace scengen {

bool dominates(const FitnessVector& a, const FitnessVector& b) {
  bool strictly_better = false;
  for (std::size_t i = 0; i < 3; ++i) {
    const bool min = FitnessVector::kDirections[i] == Direction::Minimize;
    const double x = a[i];
    const double y = b[i];
    if (min ? x > y : x < y) return false;
    if (x != y) strictly_better = true;
  }
  return strictly_better;
}

ParamPoint normalize(const ConcreteTestCase& tc) {
  ParamPoint p(tc.values.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Range& r = tc.scenario->range(i);
    p[i] = r.width() > 0 ? (tc.values[i] - r.lo) / r.width() : 0.0;
  }
  return p;
}

double mhd(const SimTrace& trace) {
  if (trace.npc_count() == 0) throw NoNpc();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& row : trace.steps) {
    for (std::size_t i = 1; i < row.size(); ++i) best = std::min(best, headway_distance(row[0], row[i], trace.road));
  }
  return best;
}

std::vector<StationaryPoint> stationary_points(std::span<const double> signal, double tolerance) {
  struct Run {
    std::size_t start;
    std::size_t length;
    double value;
  };
  std::vector<Run> runs;
  for (std::size_t i = 0; i < signal.size(); ++i) {
    if (!runs.empty() && std::abs(signal[i] - runs.back().value) <= tolerance) {
      ++runs.back().length;
    } else {
      runs.push_back({i, 1, signal[i]});
    }
  }
  std::vector<StationaryPoint> out;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    bool stationary = runs[r].length >= 2;
    if (!stationary && r > 0 && r + 1 < runs.size()) {
      const double before = runs[r].value - runs[r - 1].value;
      const double after = runs[r + 1].value - runs[r].value;
      stationary = (before > 0) != (after > 0);
    }
    if (stationary) out.push_back({runs[r].start, runs[r].value});
  }
  return out;
}

double acr_series(std::span<const double> accel, double dt, double eta) {
  if (accel.size() < 3) throw TraceTooShort("acceleration change rate needs at least three samples");
  if (!(eta > 0)) throw Error("eta must be positive");
  const auto points = stationary_points(accel);
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      if (std::abs(points[i].value - points[j].value) >= eta) ++pairs;
    }
  }
  const double duration = static_cast<double>(accel.size() - 1) * dt;
  return static_cast<double>(pairs) / duration;
}

double acr(const SimTrace& trace, double eta) {
  std::vector<double> a;
  a.reserve(trace.steps.size());
  for (const auto& row : trace.steps) a.push_back(row.front().a);
  return acr_series(a, trace.dt, eta);
}

double div(std::span<const ParamPoint> points) {
  if (points.empty()) throw DimensionMismatch("diversity of an empty point set");
  const std::size_t d = points.front().size();
  for (const auto& p : points) {
    if (p.size() != d) throw DimensionMismatch("points have different dimensions");
  }
  if (points.size() == 1) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      double sq = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double diff = points[i][k] - points[j][k];
        sq += diff * diff;
      }
      sum += std::sqrt(sq);
    }
  }
  const double n = static_cast<double>(points.size());
  return sum / (n * (n - 1.0) / 2.0);
}

FitnessVector evaluate(const ConcreteTestCase& tc, const SimTrace& trace, std::span<const ParamPoint> population,
                       const FitnessConfig& cfg) {
  std::vector<ParamPoint> pts(population.begin(), population.end());
  ParamPoint own = normalize(tc);
  // Set union: the case may already be part of its reference population.
  if (std::find(pts.begin(), pts.end(), own) == pts.end()) pts.push_back(std::move(own));
  return {mhd(trace), acr(trace, cfg.eta), div(pts)};
}

}  // namespace scengen
