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

#include "scengen/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "scengen/batch.hpp"
#include "scengen/error.hpp"
#include "text_util.hpp"

namespace scengen {

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + (stream + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void SearchConfig::validate() const {
  auto rate_ok = [](double r) { return r >= 0.0 && r <= 1.0; };
  if (p_max == 1) throw ConfigError("p_max must be at least 2");
  if (g_max < 1) throw ConfigError("g_max must be at least 1");
  if (!rate_ok(crossover_rate)) throw ConfigError("crossover_rate must be in [0,1]");
  if (!rate_ok(mutation_rate)) throw ConfigError("mutation_rate must be in [0,1]");
  if (!(eta_m >= 0.0)) throw ConfigError("eta_m must be non-negative");
  if (tournament_size < 2) throw ConfigError("tournament size must be at least 2");
  if (!(collision_threshold > 0.0)) throw ConfigError("collision threshold must be positive");
  if (max_retries < 1) throw ConfigError("max_retries must be positive");
}

std::size_t SearchConfig::population_size(const LogicalScenario& ls) const {
  if (p_max != 0) return p_max;
  return std::max<std::size_t>(2, ls.tpl().length());
}

// ---------------------------------------------------------------- history --

std::string history_line(const LogicalScenario& ls, const HistoryRecord& r) {
  nlohmann::json assignment = nlohmann::json::object();
  for (std::size_t i = 0; i < ls.dimension() && i < r.values.size(); ++i) {
    const auto& ref = ls.slots()[i];
    // 1-based statement numbers, as in the scenario file.
    const std::string key = "s" + std::to_string(ref.statement + 1) + "." + ref.subject.str() + "." +
                            std::string(statement_keyword(ref.statement_kind)) + "." +
                            std::string(param_name(ref.kind));
    assignment[key] = r.values[i];
  }
  nlohmann::ordered_json j;
  j["sim"] = r.sim;
  j["generation"] = r.generation;
  j["values"] = r.values;
  j["assignment"] = std::move(assignment);
  j["fitness"] = {{"mhd", r.fv.mhd}, {"acr", r.fv.acr}, {"div", r.fv.div}};
  j["critical"] = r.critical;
  j["harvested"] = r.harvested;
  return j.dump();
}

std::string history_to_jsonl(const LogicalScenario& ls, std::span<const HistoryRecord> history) {
  std::string out;
  for (const auto& r : history) {
    out += history_line(ls, r);
    out += '\n';
  }
  return out;
}

std::vector<HistoryRecord> parse_history(std::string_view jsonl) {
  std::vector<HistoryRecord> out;
  std::size_t line_no = 0;
  for (auto line : text::lines(jsonl)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      HistoryRecord r;
      r.sim = j.at("sim").get<std::size_t>();
      r.generation = j.at("generation").get<int>();
      r.values = j.at("values").get<std::vector<double>>();
      const auto& f = j.at("fitness");
      r.fv = {f.at("mhd").get<double>(), f.at("acr").get<double>(), f.at("div").get<double>()};
      r.critical = j.at("critical").get<bool>();
      r.harvested = j.value("harvested", false);
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(line_no, 1, std::string("history record: ") + e.what());
    }
  }
  return out;
}

// --------------------------------------------------------------- sampling --

ConcreteTestCase sample_case(const LogicalScenarioPtr& ls, Rng& rng, int max_retries, double vehicle_length) {
  const std::size_t d = ls->dimension();
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    std::vector<double> values(d);
    for (std::size_t i = 0; i < d; ++i) {
      const Range& r = ls->range(i);
      if (ls->integer_slot(i)) {
        std::uniform_int_distribution<long> pick(static_cast<long>(std::ceil(r.lo)),
                                                 static_cast<long>(std::floor(r.hi)));
        values[i] = static_cast<double>(pick(rng));
      } else if (r.width() > 0) {
        values[i] = std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
      } else {
        values[i] = r.lo;
      }
    }
    ConcreteTestCase tc = instantiate(ls, std::move(values));
    if (validate_concrete(tc, vehicle_length).ok()) return tc;
  }
  throw SamplingExhausted("no valid case in " + std::to_string(max_retries) + " consecutive samples");
}

std::vector<ConcreteTestCase> initial_population(const LogicalScenarioPtr& ls, std::size_t p_max, Rng& rng,
                                                 int max_retries, double vehicle_length) {
  std::vector<ConcreteTestCase> out;
  out.reserve(p_max);
  while (out.size() < p_max) out.push_back(sample_case(ls, rng, max_retries, vehicle_length));
  return out;
}

// -------------------------------------------------------------- selection --

std::vector<std::vector<std::size_t>> non_dominated_sort(std::span<const FitnessVector> fvs) {
  const std::size_t n = fvs.size();
  std::vector<std::vector<std::size_t>> dominated_by_me(n);
  std::vector<std::size_t> domination_count(n, 0);
  std::vector<std::vector<std::size_t>> fronts(1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (dominates(fvs[i], fvs[j])) {
        dominated_by_me[i].push_back(j);
      } else if (dominates(fvs[j], fvs[i])) {
        ++domination_count[i];
      }
    }
    if (domination_count[i] == 0) fronts[0].push_back(i);
  }
  while (!fronts.back().empty()) {
    std::vector<std::size_t> next;
    for (std::size_t i : fronts.back()) {
      for (std::size_t j : dominated_by_me[i]) {
        if (--domination_count[j] == 0) next.push_back(j);
      }
    }
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(next));
  }
  fronts.pop_back();
  return fronts;
}

std::vector<double> crowding_distance(std::span<const FitnessVector> fvs, std::span<const std::size_t> front) {
  const std::size_t m = front.size();
  std::vector<double> dist(m, 0.0);
  if (m <= 2) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
    return dist;
  }
  std::vector<std::size_t> order(m);
  for (std::size_t obj = 0; obj < 3; ++obj) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fvs[front[a]][obj] < fvs[front[b]][obj]; });
    const double lo = fvs[front[order.front()]][obj];
    const double hi = fvs[front[order.back()]][obj];
    dist[order.front()] = dist[order.back()] = std::numeric_limits<double>::infinity();
    if (!(hi > lo)) continue;
    for (std::size_t k = 1; k + 1 < m; ++k) {
      dist[order[k]] += (fvs[front[order[k + 1]]][obj] - fvs[front[order[k - 1]]][obj]) / (hi - lo);
    }
  }
  return dist;
}

std::vector<EvaluatedCase> pareto_select(std::vector<EvaluatedCase> pool, std::size_t p_max) {
  std::vector<FitnessVector> fvs;
  fvs.reserve(pool.size());
  for (const auto& c : pool) fvs.push_back(c.fv);
  const auto fronts = non_dominated_sort(fvs);

  std::vector<EvaluatedCase> out;
  out.reserve(std::min(p_max, pool.size()));
  for (std::size_t f = 0; f < fronts.size() && out.size() < p_max; ++f) {
    const auto& front = fronts[f];
    const auto crowd = crowding_distance(fvs, front);
    std::vector<std::size_t> order(front.size());
    std::iota(order.begin(), order.end(), 0);
    if (out.size() + front.size() > p_max) {
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return crowd[a] > crowd[b]; });
      order.resize(p_max - out.size());
    }
    for (std::size_t k : order) {
      EvaluatedCase c = std::move(pool[front[k]]);
      c.rank = static_cast<int>(f) + 1;
      c.crowding = crowd[k];
      out.push_back(std::move(c));
    }
  }
  return out;
}

const EvaluatedCase& tournament(std::span<const EvaluatedCase> pop, std::size_t k, Rng& rng) {
  if (pop.empty()) throw Error("tournament over an empty population");
  std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
  const EvaluatedCase* best = &pop[pick(rng)];
  for (std::size_t i = 1; i < k; ++i) {
    const EvaluatedCase* c = &pop[pick(rng)];
    if (c->rank < best->rank || (c->rank == best->rank && c->crowding > best->crowding)) best = c;
  }
  return *best;
}

// -------------------------------------------------------------- variation --

std::pair<ConcreteTestCase, ConcreteTestCase> swap_npc(const ConcreteTestCase& a, const ConcreteTestCase& b,
                                                       VehicleId npc) {
  if (a.scenario.get() != b.scenario.get() && !(*a.scenario == *b.scenario)) {
    throw Error("crossover between cases of different scenarios");
  }
  ConcreteTestCase x = a;
  ConcreteTestCase y = b;
  const auto& slots = a.scenario->slots();
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].subject == npc) std::swap(x.values[i], y.values[i]);
  }
  return {std::move(x), std::move(y)};
}

std::pair<ConcreteTestCase, ConcreteTestCase> crossover(const ConcreteTestCase& a, const ConcreteTestCase& b,
                                                        double rate, Rng& rng, double vehicle_length) {
  if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) >= rate) return {a, b};
  const auto npcs = a.scenario->tpl().npcs();
  if (npcs.empty()) return {a, b};
  std::uniform_int_distribution<std::size_t> pick(0, npcs.size() - 1);
  auto children = swap_npc(a, b, npcs[pick(rng)]);
  if (!validate_concrete(children.first, vehicle_length).ok() ||
      !validate_concrete(children.second, vehicle_length).ok()) {
    return {a, b};
  }
  return children;
}

double polynomial_mutation(double x, double lo, double hi, double eta_m, Rng& rng) {
  if (!(hi > lo)) return lo;
  const double y = std::clamp(x, lo, hi);
  const double delta1 = (y - lo) / (hi - lo);
  const double delta2 = (hi - y) / (hi - lo);
  const double rnd = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  const double mut_pow = 1.0 / (eta_m + 1.0);
  double deltaq;
  if (rnd <= 0.5) {
    const double xy = 1.0 - delta1;
    const double val = 2.0 * rnd + (1.0 - 2.0 * rnd) * std::pow(xy, eta_m + 1.0);
    deltaq = std::pow(val, mut_pow) - 1.0;
  } else {
    const double xy = 1.0 - delta2;
    const double val = 2.0 * (1.0 - rnd) + 2.0 * (rnd - 0.5) * std::pow(xy, eta_m + 1.0);
    deltaq = 1.0 - std::pow(val, mut_pow);
  }
  return std::clamp(y + deltaq * (hi - lo), lo, hi);
}

ConcreteTestCase mutate(const ConcreteTestCase& tc, double rate, double eta_m, Rng& rng, int max_retries,
                        double vehicle_length) {
  if (rate <= 0.0) return tc;
  const auto& ls = *tc.scenario;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    ConcreteTestCase child = tc;
    for (std::size_t i = 0; i < child.values.size(); ++i) {
      if (coin(rng) >= rate) continue;
      const Range& r = ls.range(i);
      double v = polynomial_mutation(child.values[i], r.lo, r.hi, eta_m, rng);
      if (ls.integer_slot(i)) v = std::clamp(std::round(v), std::ceil(r.lo), std::floor(r.hi));
      child.values[i] = v;
    }
    if (validate_concrete(child, vehicle_length).ok()) return child;
  }
  throw MutationExhausted("no valid mutant in " + std::to_string(max_retries) + " attempts");
}

// ------------------------------------------------------------------ loop --

namespace {

class Evaluator {
 public:
  explicit Evaluator(const SearchRuntime& rt) : rt_(rt) {
    for (const auto& r : rt.resume) resume_.emplace(r.sim, &r);
  }

  // Simulates `cases` as generation `g` with diversity measured against
  // `reference` (plus the archive in archive mode).
  std::vector<EvaluatedCase> run(std::vector<ConcreteTestCase> cases, int g, std::vector<ParamPoint> reference,
                                 SearchResult& result) {
    if (rt_.fitness.archive_div) reference.insert(reference.begin(), archive_.begin(), archive_.end());

    std::vector<EvaluatedCase> out(cases.size());
    std::vector<ConcreteTestCase> todo;
    std::vector<std::size_t> todo_at;
    for (std::size_t i = 0; i < cases.size(); ++i) {
      out[i].sim = ++result.simulations;
      out[i].generation = g;
      cases[i].seed_id = static_cast<std::int64_t>(out[i].sim);
      auto it = resume_.find(out[i].sim);
      if (it != resume_.end() && it->second->values == cases[i].values && it->second->generation == g) {
        out[i].fv = it->second->fv;
        ++result.reused;
      } else {
        todo.push_back(cases[i]);
        todo_at.push_back(i);
      }
      out[i].tc = std::move(cases[i]);
    }

    auto evals = rt_.jobs == 1 ? evaluate_batch_serial(todo, reference, rt_.sim, rt_.fitness)
                               : evaluate_batch(todo, reference, rt_.sim, rt_.fitness, rt_.jobs);
    for (std::size_t k = 0; k < evals.size(); ++k) {
      out[todo_at[k]].fv = evals[k].fv;
      out[todo_at[k]].trace = std::move(evals[k].trace);
    }
    if (rt_.fitness.archive_div) {
      for (const auto& c : out) archive_.push_back(normalize(c.tc));
    }
    return out;
  }

 private:
  const SearchRuntime& rt_;
  std::map<std::size_t, const HistoryRecord*> resume_;
  std::vector<ParamPoint> archive_;
};

std::vector<ParamPoint> points_of(std::span<const ConcreteTestCase> cases) {
  std::vector<ParamPoint> pts;
  pts.reserve(cases.size());
  for (const auto& c : cases) pts.push_back(normalize(c));
  return pts;
}

std::vector<ParamPoint> points_of(std::span<const EvaluatedCase> cases) {
  std::vector<ParamPoint> pts;
  pts.reserve(cases.size());
  for (const auto& c : cases) pts.push_back(normalize(c.tc));
  return pts;
}

void record(SearchResult& result, const std::vector<EvaluatedCase>& fresh, const std::set<std::size_t>& harvested,
            double threshold) {
  for (const auto& c : fresh) {
    result.history.push_back({c.sim, c.generation, c.tc.values, c.fv, c.critical(threshold),
                              harvested.count(c.sim) > 0});
  }
}

void check_preconditions(const LogicalScenarioPtr& ls, const SearchConfig& cfg, const SearchRuntime& rt) {
  if (!ls) throw Error("no logical scenario");
  cfg.validate();
  rt.sim.validate();
  if (!ls->tpl().ego) throw InvalidTestCase("logical scenario declares no ego vehicle");
  if (ls->tpl().npcs().empty()) throw NoNpc();
}

}  // namespace

SearchResult run_search(const LogicalScenarioPtr& ls, const SearchConfig& cfg, const SearchRuntime& rt) {
  check_preconditions(ls, cfg, rt);
  const std::size_t p = cfg.population_size(*ls);
  const double length = rt.sim.physics.vehicle_length;
  Rng rng(cfg.rng_seed);
  Evaluator evaluator(rt);
  SearchResult result;
  std::vector<EvaluatedCase> population;
  std::set<std::size_t> harvested;

  for (int g = 1; g <= cfg.g_max; ++g) {
    std::vector<ConcreteTestCase> candidates;
    std::vector<ParamPoint> reference;
    if (g == 1) {
      candidates = initial_population(ls, p, rng, cfg.max_retries, length);
      reference = points_of(candidates);
    } else {
      while (candidates.size() < p) {
        const auto& first = tournament(population, cfg.tournament_size, rng);
        const auto& second = tournament(population, cfg.tournament_size, rng);
        auto [c1, c2] = crossover(first.tc, second.tc, cfg.crossover_rate, rng, length);
        for (auto* child : {&c1, &c2}) {
          try {
            *child = mutate(*child, cfg.mutation_rate, cfg.eta_m, rng, cfg.max_retries, length);
          } catch (const MutationExhausted&) {
            // Keep the crossover child as is; it is already valid.
          }
        }
        candidates.push_back(std::move(c1));
        if (candidates.size() < p) candidates.push_back(std::move(c2));
      }
      reference = points_of(population);
    }

    auto fresh = evaluator.run(std::move(candidates), g, std::move(reference), result);
    std::vector<EvaluatedCase> pool = population;
    pool.insert(pool.end(), fresh.begin(), fresh.end());
    population = pareto_select(std::move(pool), p);

    std::vector<const EvaluatedCase*> found;
    for (const auto& c : population) {
      if (c.critical(cfg.collision_threshold) && !harvested.count(c.sim)) found.push_back(&c);
    }
    std::sort(found.begin(), found.end(), [](auto* a, auto* b) { return a->sim < b->sim; });
    for (const auto* c : found) {
      harvested.insert(c->sim);
      result.critical.cases.push_back(*c);
      result.critical.discovery_log.push_back(c->sim);
    }
    record(result, fresh, harvested, cfg.collision_threshold);
  }
  result.population = std::move(population);
  return result;
}

SearchResult run_random(const LogicalScenarioPtr& ls, const SearchConfig& cfg, const SearchRuntime& rt) {
  check_preconditions(ls, cfg, rt);
  const std::size_t p = cfg.population_size(*ls);
  const double length = rt.sim.physics.vehicle_length;
  Rng rng(cfg.rng_seed);
  Evaluator evaluator(rt);
  SearchResult result;
  std::set<std::size_t> harvested;

  for (int g = 1; g <= cfg.g_max; ++g) {
    auto candidates = initial_population(ls, p, rng, cfg.max_retries, length);
    auto reference = points_of(candidates);
    auto fresh = evaluator.run(std::move(candidates), g, std::move(reference), result);
    for (const auto& c : fresh) {
      if (!c.critical(cfg.collision_threshold)) continue;
      harvested.insert(c.sim);
      result.critical.cases.push_back(c);
      result.critical.discovery_log.push_back(c.sim);
    }
    record(result, fresh, harvested, cfg.collision_threshold);
    result.population = std::move(fresh);
  }
  return result;
}

}  // namespace scengen
