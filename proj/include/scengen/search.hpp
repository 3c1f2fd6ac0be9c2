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

// Multi-objective genetic search over the parameter space of a logical
// scenario. Generation 1 samples uniformly; later generations breed
// p_max offspring by tournament selection, NPC-block crossover and
// polynomial mutation, then keep the best p_max of parents and offspring by
// non-dominated sorting with crowding-distance truncation. Critical cases
// (mhd below the collision threshold) in the surviving population are
// harvested every generation.
//
// The loop itself is single-threaded and owns the only RNG stream; a
// generation's simulations are fanned out through evaluate_batch.

#ifndef SCENGEN_SEARCH_HPP_
#define SCENGEN_SEARCH_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scengen/dsl.hpp"
#include "scengen/fitness.hpp"
#include "scengen/microsim.hpp"

namespace scengen {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; derives independent sub-seeds from one seed.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream);

struct SearchConfig {
  /// 0 means "the template's statement count".
  std::size_t p_max = 0;
  int g_max = 10;
  double crossover_rate = 0.4;
  double mutation_rate = 0.5;
  double eta_m = 20.0;
  std::size_t tournament_size = 2;
  std::uint64_t rng_seed = 1;
  double collision_threshold = kDefaultVehicleLength;
  /// Consecutive failed resamples/re-mutations before giving up.
  int max_retries = 100;

  /// Throws ConfigError.
  void validate() const;
  std::size_t population_size(const LogicalScenario& ls) const;
};

struct EvaluatedCase {
  ConcreteTestCase tc;
  FitnessVector fv;
  /// May be null for cases restored from a history file.
  std::shared_ptr<const SimTrace> trace;
  int generation = 0;
  /// 1-based simulation index within the run.
  std::size_t sim = 0;
  /// Filled in by pareto_select (rank 1 = non-dominated).
  int rank = 0;
  double crowding = 0.0;

  bool critical(double threshold) const { return fv.mhd < threshold; }
};

struct CriticalSet {
  std::vector<EvaluatedCase> cases;
  /// Simulation index of each case, in discovery order.
  std::vector<std::size_t> discovery_log;

  bool empty() const { return cases.empty(); }
  std::size_t size() const { return cases.size(); }
};

struct HistoryRecord {
  std::size_t sim = 0;
  int generation = 0;
  std::vector<double> values;
  FitnessVector fv;
  bool critical = false;
  bool harvested = false;
  bool operator==(const HistoryRecord&) const = default;
};

/// One JSON object per line; `assignment` labels values by slot.
std::string history_line(const LogicalScenario& ls, const HistoryRecord& r);
std::string history_to_jsonl(const LogicalScenario& ls, std::span<const HistoryRecord> history);
std::vector<HistoryRecord> parse_history(std::string_view jsonl);

/// One uniform draw of every slot (integer slots uniformly over the integers
/// in range), repeated until validate_concrete passes. Throws
/// SamplingExhausted after `max_retries` failures.
ConcreteTestCase sample_case(const LogicalScenarioPtr& ls, Rng& rng, int max_retries, double vehicle_length);
std::vector<ConcreteTestCase> initial_population(const LogicalScenarioPtr& ls, std::size_t p_max, Rng& rng,
                                                 int max_retries = 100,
                                                 double vehicle_length = kDefaultVehicleLength);

/// Non-dominated fronts as index lists, best first.
std::vector<std::vector<std::size_t>> non_dominated_sort(std::span<const FitnessVector> fvs);
/// Crowding distance of each member of `front` (boundary points get +inf).
std::vector<double> crowding_distance(std::span<const FitnessVector> fvs, std::span<const std::size_t> front);
/// Fill by rank, truncate the last admitted front by descending crowding
/// distance. Sets rank/crowding on the returned cases.
std::vector<EvaluatedCase> pareto_select(std::vector<EvaluatedCase> pool, std::size_t p_max);

/// Best of k uniform draws with replacement by (rank asc, crowding desc).
const EvaluatedCase& tournament(std::span<const EvaluatedCase> pop, std::size_t k, Rng& rng);

/// Exchanges every slot owned by `npc` (constructor and actions).
std::pair<ConcreteTestCase, ConcreteTestCase> swap_npc(const ConcreteTestCase& a, const ConcreteTestCase& b,
                                                       VehicleId npc);
/// With probability `rate`, swap one uniformly chosen NPC; the swap is kept
/// only if both children pass validate_concrete.
std::pair<ConcreteTestCase, ConcreteTestCase> crossover(const ConcreteTestCase& a, const ConcreteTestCase& b,
                                                        double rate, Rng& rng,
                                                        double vehicle_length = kDefaultVehicleLength);

/// Bounded polynomial mutation of one value; result in [lo, hi].
double polynomial_mutation(double x, double lo, double hi, double eta_m, Rng& rng);
/// Mutates each slot with probability `rate`; integer slots are rounded and
/// clamped. Throws MutationExhausted if no valid child appears within
/// `max_retries` attempts.
ConcreteTestCase mutate(const ConcreteTestCase& tc, double rate, double eta_m, Rng& rng, int max_retries = 100,
                        double vehicle_length = kDefaultVehicleLength);

struct SearchRuntime {
  SimConfig sim;
  FitnessConfig fitness;
  /// Threads for a generation's evaluations; 1 runs the serial reference.
  int jobs = 1;
  /// Earlier history of the same (scenario, config, seed): matching records
  /// are reused instead of re-simulated.
  std::vector<HistoryRecord> resume;
};

struct SearchResult {
  CriticalSet critical;
  std::vector<HistoryRecord> history;
  std::vector<EvaluatedCase> population;
  std::size_t simulations = 0;
  std::size_t reused = 0;
};

SearchResult run_search(const LogicalScenarioPtr& ls, const SearchConfig& cfg, const SearchRuntime& rt);

/// Baseline with the same budget (p_max * g_max simulations): every case is
/// sampled uniformly and every critical one is kept.
SearchResult run_random(const LogicalScenarioPtr& ls, const SearchConfig& cfg, const SearchRuntime& rt);

}  // namespace scengen

#endif  // SCENGEN_SEARCH_HPP_
