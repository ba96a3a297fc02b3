#include "netgap/allocation.hpp"

#include "netgap/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include <json.hpp>

using nlohmann::json;

namespace netgap {

namespace {

constexpr std::size_t kExternal = std::numeric_limits<std::size_t>::max();
constexpr double kTolerance = 1e-9;

}  // namespace

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::excluded_slot: return "excluded_slot";
    case ViolationKind::compute: return "compute";
    case ViolationKind::out_bandwidth: return "out_bandwidth";
    case ViolationKind::in_bandwidth: return "in_bandwidth";
    case ViolationKind::part_mixing: return "part_mixing";
  }
  return "?";
}

double FeasibilityReport::total_magnitude() const {
  double s = 0.0;
  for (const Violation& v : violations) s += v.magnitude;
  return s;
}

AllocationProblem::AllocationProblem(const ApplicationModel& model, const ModuleCatalog& catalog,
                                     std::size_t slots, double capacity_scale)
    : scale_(capacity_scale) {
  processes_.resize(model.processes().size());
  std::iota(processes_.begin(), processes_.end(), std::size_t{0});
  init(model, catalog, slots);
}

AllocationProblem::AllocationProblem(const ApplicationModel& model, const ModuleCatalog& catalog,
                                     std::size_t slots, double capacity_scale,
                                     std::vector<std::size_t> process_subset)
    : processes_(std::move(process_subset)), scale_(capacity_scale) {
  init(model, catalog, slots);
}

void AllocationProblem::init(const ApplicationModel& model, const ModuleCatalog& catalog,
                             std::size_t slots) {
  if (slots == 0) throw Error("allocation needs at least one candidate slot");
  if (processes_.empty()) throw Error("allocation needs at least one process");
  if (!(scale_ > 0.0)) throw Error("capacity scale must be positive");
  const auto types = catalog.processing_types();
  for (std::size_t j = 0; j < slots; ++j) slots_.push_back(*types[j % types.size()]);

  std::vector<std::size_t> local(model.processes().size(), kExternal);
  for (std::size_t i = 0; i < processes_.size(); ++i) {
    const std::size_t p = processes_[i];
    if (p >= model.processes().size()) throw Error("process subset index out of range");
    local[p] = i;
    demand_.push_back(model.processes()[p].compute_mops);
    part_.push_back(static_cast<int>(model.part_index(model.processes()[p].part)));
  }
  part_count_ = model.parts().size();
  if (part_count_ > 32) throw Error("at most 32 application parts are supported");
  for (const Message& m : model.messages()) {
    const std::size_t s = local[m.src_index];
    const std::size_t d = local[m.dst_index];
    if (s == kExternal && d == kExternal) continue;
    flows_.push_back({s, d, m.bandwidth_mbps});
  }
  double total_cost = 0.0;
  for (const ModuleSpec& s : slots_) total_cost += s.cost;
  lambda_ = 10.0 * std::max(total_cost, 1.0);
}

void AllocationProblem::check_shape(const AllocationGenome& g) const {
  if (g.inclusion.size() != slots_.size() || g.assignment.size() != processes_.size()) {
    throw Error("genome shape (" + std::to_string(g.inclusion.size()) + "," +
                std::to_string(g.assignment.size()) + ") does not match problem (" +
                std::to_string(slots_.size()) + "," + std::to_string(processes_.size()) + ")");
  }
  for (int a : g.assignment)
    if (a < 0 || static_cast<std::size_t>(a) >= slots_.size())
      throw Error("genome assigns a process to slot " + std::to_string(a) + " out of range");
}

void AllocationProblem::loads(const AllocationGenome& g, Loads& l) const {
  const std::size_t q = slots_.size();
  l.compute.assign(q, 0.0);
  l.out.assign(q, 0.0);
  l.in.assign(q, 0.0);
  l.part_mask.assign(q, 0);
  for (std::size_t i = 0; i < processes_.size(); ++i) {
    const auto j = static_cast<std::size_t>(g.assignment[i]);
    l.compute[j] += demand_[i];
    l.part_mask[j] |= 1u << part_[i];
  }
  for (const Flow& f : flows_) {
    const std::size_t sj = f.src == kExternal ? kExternal : static_cast<std::size_t>(g.assignment[f.src]);
    const std::size_t dj = f.dst == kExternal ? kExternal : static_cast<std::size_t>(g.assignment[f.dst]);
    if (sj == dj) continue;  // co-located: no interface usage
    if (sj != kExternal) l.out[sj] += f.mbps;
    if (dj != kExternal) l.in[dj] += f.mbps;
  }
}

FeasibilityReport AllocationProblem::check_feasibility(const AllocationGenome& g) const {
  check_shape(g);
  FeasibilityReport rep;
  for (std::size_t i = 0; i < processes_.size(); ++i) {
    const int j = g.assignment[i];
    if (!g.inclusion[static_cast<std::size_t>(j)])
      rep.violations.push_back({ViolationKind::excluded_slot, j, 1.0});
  }
  Loads l;
  loads(g, l);
  for (std::size_t j = 0; j < slots_.size(); ++j) {
    const ModuleSpec& s = slots_[j];
    const int slot = static_cast<int>(j);
    if (const double over = l.compute[j] - s.compute_mops * scale_; over > kTolerance)
      rep.violations.push_back({ViolationKind::compute, slot, over});
    if (const double over = l.out[j] - s.link_mbps * scale_; over > kTolerance)
      rep.violations.push_back({ViolationKind::out_bandwidth, slot, over});
    if (const double over = l.in[j] - s.link_mbps * scale_; over > kTolerance)
      rep.violations.push_back({ViolationKind::in_bandwidth, slot, over});
    if (const int parts = std::popcount(l.part_mask[j]); parts > 1)
      rep.violations.push_back({ViolationKind::part_mixing, slot, static_cast<double>(parts - 1)});
  }
  rep.feasible = rep.violations.empty();
  return rep;
}

double AllocationProblem::module_cost(const AllocationGenome& g) const {
  double c = 0.0;
  for (std::size_t j = 0; j < slots_.size(); ++j)
    if (g.inclusion[j]) c += slots_[j].cost;
  return c;
}

Fitness AllocationProblem::fitness(const AllocationGenome& g, FitnessPhase phase) const {
  const FeasibilityReport rep = check_feasibility(g);
  Fitness f;
  f.feasible = rep.feasible;
  const double penalty = lambda_ * rep.total_magnitude();
  if (phase == FitnessPhase::primary) {
    f.score = module_cost(g) + penalty;
    return f;
  }
  Loads l;
  loads(g, l);
  double sum = 0.0, sum_sq = 0.0;
  std::size_t n = 0;
  for (std::size_t j = 0; j < slots_.size(); ++j) {
    if (!g.inclusion[j]) continue;
    const double u = l.compute[j] / slots_[j].compute_mops;
    sum += u;
    sum_sq += u * u;
    ++n;
  }
  double variance = 0.0;
  if (n > 0) {
    const double mean = sum / static_cast<double>(n);
    variance = std::max(0.0, sum_sq / static_cast<double>(n) - mean * mean);
  }
  f.score = variance + penalty;
  return f;
}

bool AllocationProblem::infeasible_by_construction(std::string* why) const {
  const double demand = std::accumulate(demand_.begin(), demand_.end(), 0.0);
  double capacity = 0.0;
  for (const ModuleSpec& s : slots_) capacity += s.compute_mops * scale_;
  double largest_slot = 0.0;
  for (const ModuleSpec& s : slots_) largest_slot = std::max(largest_slot, s.compute_mops * scale_);
  const double largest_process = *std::max_element(demand_.begin(), demand_.end());
  if (demand > capacity + kTolerance) {
    if (why) {
      *why = "total compute demand " + std::to_string(demand) + " Mops exceeds the capacity " +
             std::to_string(capacity) + " Mops of " + std::to_string(slots_.size()) +
             " candidate slots";
    }
    return true;
  }
  if (largest_process > largest_slot + kTolerance) {
    if (why) {
      *why = "a process demands " + std::to_string(largest_process) +
             " Mops, more than any candidate slot offers";
    }
    return true;
  }
  return false;
}

FeasibilityReport check_feasibility(const AllocationGenome& genome, const ApplicationModel& model,
                                    const ModuleCatalog& catalog) {
  AllocationProblem p(model, catalog, genome.inclusion.size(), 1.0);
  return p.check_feasibility(genome);
}

Fitness fitness(const AllocationGenome& genome, const ApplicationModel& model,
                const ModuleCatalog& catalog, FitnessPhase phase) {
  AllocationProblem p(model, catalog, genome.inclusion.size(), 1.0);
  return p.fitness(genome, phase);
}

// Genetic algorithm ---------------------------------------------------------

namespace {

struct Individual {
  AllocationGenome genome;
  Fitness fit;
};

std::vector<int> included_slots(const std::vector<std::uint8_t>& inclusion) {
  std::vector<int> out;
  for (std::size_t j = 0; j < inclusion.size(); ++j)
    if (inclusion[j]) out.push_back(static_cast<int>(j));
  return out;
}

void ensure_some_slot(std::vector<std::uint8_t>& inclusion, Rng& rng) {
  if (std::find(inclusion.begin(), inclusion.end(), std::uint8_t{1}) == inclusion.end())
    inclusion[uniform_index(rng, inclusion.size())] = 1;
}

template <typename T>
void two_point_crossover(std::vector<T>& a, std::vector<T>& b, Rng& rng) {
  const std::size_t n = a.size();
  if (n < 2) return;
  std::size_t i = uniform_index(rng, n + 1);
  std::size_t k = uniform_index(rng, n + 1);
  if (i > k) std::swap(i, k);
  for (std::size_t x = i; x < k; ++x) std::swap(a[x], b[x]);
}

// Per-slot compute load and part mix of a genome under edit.
class SlotState {
public:
  SlotState(const AllocationProblem& p, const AllocationGenome& g)
      : load_(p.slot_count(), 0.0), members_(p.slot_count() * 32, 0) {
    for (std::size_t i = 0; i < g.assignment.size(); ++i) add(p, i, g.assignment[i]);
  }

  // A random included slot that can take process i without overflowing or
  // mixing parts; any included slot when none can.
  int pick(const AllocationProblem& p, const AllocationGenome& g, std::size_t i, Rng& rng) {
    const int current = g.assignment[i];
    const std::uint32_t bit = 1u << p.part(i);
    fits_.clear();
    any_.clear();
    for (std::size_t j = 0; j < g.inclusion.size(); ++j) {
      if (!g.inclusion[j] || static_cast<int>(j) == current) continue;
      any_.push_back(static_cast<int>(j));
      if (load_[j] + p.demand(i) <= p.capacity(j) && (part_mask(j) & ~bit) == 0) fits_.push_back(static_cast<int>(j));
    }
    if (!fits_.empty()) return fits_[uniform_index(rng, fits_.size())];
    if (!any_.empty()) return any_[uniform_index(rng, any_.size())];
    return current;
  }

  void move(const AllocationProblem& p, AllocationGenome& g, std::size_t i, int to) {
    add(p, i, g.assignment[i], -1);
    g.assignment[i] = to;
    add(p, i, to, 1);
  }

private:
  std::vector<double> load_;
  std::vector<int> members_;  // processes per (slot, part)
  std::vector<int> fits_, any_;

  std::uint32_t part_mask(std::size_t j) const {
    std::uint32_t mask = 0;
    for (std::size_t k = 0; k < 32; ++k)
      if (members_[j * 32 + k] > 0) mask |= 1u << k;
    return mask;
  }

  void add(const AllocationProblem& p, std::size_t i, int j, int sign = 1) {
    const auto slot = static_cast<std::size_t>(j);
    load_[slot] += sign * p.demand(i);
    members_[slot * 32 + static_cast<std::size_t>(p.part(i))] += sign;
  }
};

// Reassigns genes pointing at excluded slots: first try the donor's gene,
// otherwise a random included slot with room for the process.
void repair(const AllocationProblem& p, AllocationGenome& g, const AllocationGenome* donor, Rng& rng) {
  std::optional<SlotState> state;
  for (std::size_t i = 0; i < g.assignment.size(); ++i) {
    const auto slot = static_cast<std::size_t>(g.assignment[i]);
    if (g.inclusion[slot]) continue;
    if (!state) state.emplace(p, g);
    if (donor != nullptr && g.inclusion[static_cast<std::size_t>(donor->assignment[i])]) {
      state->move(p, g, i, donor->assignment[i]);
      continue;
    }
    state->move(p, g, i, state->pick(p, g, i, rng));
  }
}

const Individual& tournament(const std::vector<Individual>& pop, int size, Rng& rng) {
  const Individual* best = &pop[uniform_index(rng, pop.size())];
  for (int k = 1; k < size; ++k) {
    const Individual& c = pop[uniform_index(rng, pop.size())];
    if (c.fit.better_than(best->fit)) best = &c;
  }
  return *best;
}

void sort_population(std::vector<Individual>& pop) {
  std::stable_sort(pop.begin(), pop.end(), [](const Individual& a, const Individual& b) {
    return a.fit.better_than(b.fit);
  });
}

// One evolutionary run. When `frozen` is set the inclusion part is never
// touched and only assignments evolve.
Individual evolve(const AllocationProblem& problem, std::vector<Individual> pop,
                  const Sp1Config& cfg, FitnessPhase phase, bool frozen, Rng& rng,
                  std::size_t& generations_run) {
  const std::size_t q = problem.slot_count();
  const std::size_t m = problem.process_count();
  const std::size_t pop_size = pop.size();
  const std::size_t elite = std::min<std::size_t>(static_cast<std::size_t>(cfg.elitism), pop_size);
  const double p_incl = 1.0 / static_cast<double>(q);
  const double p_asg = 1.0 / static_cast<double>(m);

  for (Individual& ind : pop) ind.fit = problem.fitness(ind.genome, phase);
  sort_population(pop);

  generations_run = 0;
  for (int gen = 0; gen < cfg.max_generations; ++gen) {
    std::vector<Individual> next(pop.begin(), pop.begin() + static_cast<std::ptrdiff_t>(elite));
    while (next.size() < pop_size) {
      const Individual& pa = tournament(pop, cfg.tournament_size, rng);
      const Individual& pb = tournament(pop, cfg.tournament_size, rng);
      AllocationGenome a = pa.genome;
      AllocationGenome b = pb.genome;
      if (bernoulli(rng, cfg.crossover_rate)) {
        if (!frozen) two_point_crossover(a.inclusion, b.inclusion, rng);
        two_point_crossover(a.assignment, b.assignment, rng);
        if (!frozen) {
          ensure_some_slot(a.inclusion, rng);
          ensure_some_slot(b.inclusion, rng);
        }
        repair(problem, a, &pb.genome, rng);
        repair(problem, b, &pa.genome, rng);
      }
      for (AllocationGenome* child : {&a, &b}) {
        if (!frozen) {
          bool flipped = false;
          for (std::size_t j = 0; j < q; ++j) {
            if (bernoulli(rng, p_incl)) {
              child->inclusion[j] ^= 1;
              flipped = true;
            }
          }
          if (flipped) {
            ensure_some_slot(child->inclusion, rng);
            repair(problem, *child, nullptr, rng);
          }
        }
        std::optional<SlotState> state;
        for (std::size_t i = 0; i < m; ++i) {
          if (!bernoulli(rng, p_asg)) continue;
          if (!state) state.emplace(problem, *child);
          state->move(problem, *child, i, state->pick(problem, *child, i, rng));
        }
        if (next.size() < pop_size) next.push_back({std::move(*child), {}});
      }
    }
    for (std::size_t k = elite; k < next.size(); ++k)
      next[k].fit = problem.fitness(next[k].genome, phase);
    sort_population(next);
    pop = std::move(next);
    ++generations_run;
  }
  return pop.front();
}

AllocationGenome random_genome(const AllocationProblem& problem, Rng& rng) {
  AllocationGenome g;
  const std::size_t q = problem.slot_count();
  const double density = uniform01(rng);
  g.inclusion.assign(q, 0);
  for (std::size_t j = 0; j < q; ++j) g.inclusion[j] = bernoulli(rng, density) ? 1 : 0;
  ensure_some_slot(g.inclusion, rng);
  const auto included = included_slots(g.inclusion);
  g.assignment.resize(problem.process_count());
  for (int& a : g.assignment) a = included[uniform_index(rng, included.size())];
  return g;
}

// Drops included slots that host nothing; they only add cost.
void prune_empty_slots(AllocationGenome& g) {
  std::vector<std::uint8_t> used(g.inclusion.size(), 0);
  for (int a : g.assignment) used[static_cast<std::size_t>(a)] = 1;
  for (std::size_t j = 0; j < g.inclusion.size(); ++j) g.inclusion[j] = g.inclusion[j] && used[j];
}

}  // namespace

AllocationGenome run_allocation_ga(const AllocationProblem& problem, const Sp1Config& cfg,
                                   std::uint64_t seed, Sp1Trace* trace) {
  Rng rng(derive_seed(seed, 0x5031));
  const std::size_t pop_size = static_cast<std::size_t>(cfg.population);

  std::vector<Individual> pop;
  pop.reserve(pop_size);
  for (std::size_t k = 0; k < pop_size; ++k) pop.push_back({random_genome(problem, rng), {}});
  std::size_t gens = 0;
  Individual best = evolve(problem, std::move(pop), cfg, FitnessPhase::primary, false, rng, gens);
  if (trace) {
    trace->primary_best_cost = problem.module_cost(best.genome);
    trace->primary_best_feasible = best.fit.feasible;
    trace->primary_generations = gens;
  }

  // Secondary phase: freeze the inclusion vector, rebalance the assignment.
  AllocationGenome frozen = best.genome;
  prune_empty_slots(frozen);
  std::vector<Individual> seeded;
  seeded.reserve(pop_size);
  seeded.push_back({frozen, {}});
  const auto included = included_slots(frozen.inclusion);
  while (seeded.size() < pop_size) {
    AllocationGenome g = frozen;
    const std::size_t moves = 1 + uniform_index(rng, std::max<std::size_t>(1, g.assignment.size() / 8));
    for (std::size_t k = 0; k < moves; ++k) {
      const std::size_t i = uniform_index(rng, g.assignment.size());
      g.assignment[i] = included[uniform_index(rng, included.size())];
    }
    seeded.push_back({std::move(g), {}});
  }
  Individual balanced =
      evolve(problem, std::move(seeded), cfg, FitnessPhase::secondary, true, rng, gens);
  if (trace) trace->secondary_generations = gens;
  // Never trade feasibility for balance.
  Individual frozen_ind{frozen, problem.fitness(frozen, FitnessPhase::secondary)};
  if (frozen_ind.fit.better_than(balanced.fit)) balanced = frozen_ind;
  return balanced.genome;
}

double AllocationSolution::cost() const {
  double c = 0.0;
  for (const IncludedModule& m : modules) c += m.spec.cost;
  return c;
}

std::map<std::string, std::size_t> AllocationSolution::type_counts() const {
  std::map<std::string, std::size_t> out;
  for (const IncludedModule& m : modules) ++out[m.spec.type_name];
  return out;
}

AllocationSolution make_solution(const AllocationProblem& problem, const AllocationGenome& genome,
                                 const ApplicationModel& model, std::size_t slot_offset) {
  AllocationSolution sol;
  sol.slot_count = problem.slot_count();
  const FeasibilityReport rep = problem.check_feasibility(genome);
  sol.feasible = rep.feasible;
  sol.violations = rep.violations;
  for (Violation& v : sol.violations)
    if (v.slot >= 0) v.slot += static_cast<int>(slot_offset);

  std::vector<std::uint8_t> used(problem.slot_count(), 0);
  for (int a : genome.assignment) used[static_cast<std::size_t>(a)] = 1;
  std::vector<std::size_t> ordinal(problem.slot_count(), kExternal);
  for (std::size_t j = 0; j < problem.slot_count(); ++j) {
    if (!used[j]) continue;
    ordinal[j] = sol.modules.size();
    IncludedModule im;
    im.slot = static_cast<int>(j + slot_offset);
    im.spec = problem.slot(j);
    sol.modules.push_back(std::move(im));
  }
  sol.process_module.assign(model.processes().size(), kExternal);
  for (std::size_t i = 0; i < problem.process_count(); ++i) {
    const std::size_t p = problem.model_process(i);
    const std::size_t mod = ordinal[static_cast<std::size_t>(genome.assignment[i])];
    sol.process_module[p] = mod;
    IncludedModule& im = sol.modules[mod];
    im.compute_load += model.processes()[p].compute_mops;
    const std::string& part = model.processes()[p].part;
    if (std::find(im.parts.begin(), im.parts.end(), part) == im.parts.end()) im.parts.push_back(part);
  }
  for (IncludedModule& im : sol.modules) std::sort(im.parts.begin(), im.parts.end());
  for (const Message& msg : model.messages()) {
    const std::size_t s = sol.process_module[msg.src_index];
    const std::size_t d = sol.process_module[msg.dst_index];
    if (s == kExternal || d == kExternal || s == d) continue;
    sol.modules[s].out_mbps += msg.bandwidth_mbps;
    sol.modules[d].in_mbps += msg.bandwidth_mbps;
    ModuleTraffic& t = sol.traffic[{s, d}];
    t.mbps += msg.bandwidth_mbps;
    ++t.messages;
  }
  return sol;
}

namespace {

// Concatenates per-part solutions; module ordinals are renumbered in order.
AllocationSolution merge_solutions(const std::vector<AllocationSolution>& parts,
                                   const ApplicationModel& model) {
  AllocationSolution out;
  out.feasible = true;
  out.process_module.assign(model.processes().size(), kExternal);
  for (const AllocationSolution& s : parts) {
    const std::size_t base = out.modules.size();
    out.modules.insert(out.modules.end(), s.modules.begin(), s.modules.end());
    for (std::size_t p = 0; p < s.process_module.size(); ++p)
      if (s.process_module[p] != kExternal) out.process_module[p] = base + s.process_module[p];
    out.feasible = out.feasible && s.feasible;
    out.violations.insert(out.violations.end(), s.violations.begin(), s.violations.end());
    out.slot_count += s.slot_count;
  }
  for (IncludedModule& m : out.modules) m.out_mbps = m.in_mbps = 0.0;
  for (const Message& msg : model.messages()) {
    const std::size_t s = out.process_module[msg.src_index];
    const std::size_t d = out.process_module[msg.dst_index];
    if (s == d) continue;
    out.modules[s].out_mbps += msg.bandwidth_mbps;
    out.modules[d].in_mbps += msg.bandwidth_mbps;
    ModuleTraffic& t = out.traffic[{s, d}];
    t.mbps += msg.bandwidth_mbps;
    ++t.messages;
  }
  return out;
}

}  // namespace

AllocationSolution solve_sp1(const ApplicationModel& model, const ModuleCatalog& catalog,
                             const RunConfig& config, std::uint64_t seed, Sp1Trace* trace) {
  const double scale = config.sp1.tighten_by_threshold ? config.reward.overload_threshold : 1.0;
  const auto slots = static_cast<std::size_t>(config.sp1.candidate_module_slots);
  if (!config.sp1.per_part || model.parts().size() <= 1) {
    AllocationProblem problem(model, catalog, slots, scale);
    std::string why;
    if (problem.infeasible_by_construction(&why)) throw InfeasibleAllocation(why);
    const AllocationGenome best = run_allocation_ga(problem, config.sp1, seed, trace);
    return make_solution(problem, best, model);
  }
  std::vector<AllocationSolution> parts;
  for (std::size_t pi = 0; pi < model.parts().size(); ++pi) {
    std::vector<std::size_t> subset;
    for (std::size_t p = 0; p < model.processes().size(); ++p)
      if (model.processes()[p].part == model.parts()[pi]) subset.push_back(p);
    AllocationProblem problem(model, catalog, slots, scale, std::move(subset));
    std::string why;
    if (problem.infeasible_by_construction(&why))
      throw InfeasibleAllocation("part " + model.parts()[pi] + ": " + why);
    const AllocationGenome best =
        run_allocation_ga(problem, config.sp1, derive_seed(seed, pi + 1), trace);
    parts.push_back(make_solution(problem, best, model, pi * slots));
  }
  return merge_solutions(parts, model);
}

// Serialization -------------------------------------------------------------

std::string dump_allocation(const AllocationSolution& sol, const ApplicationModel& model) {
  json modules = json::array();
  for (const IncludedModule& m : sol.modules) {
    modules.push_back({{"slot", m.slot},
                       {"type_name", m.spec.type_name},
                       {"compute_capacity_mops", m.spec.compute_mops},
                       {"link_mbps", m.spec.link_mbps},
                       {"cost", m.spec.cost},
                       {"compute_load_mops", m.compute_load},
                       {"utilization", m.utilization()},
                       {"out_mbps", m.out_mbps},
                       {"in_mbps", m.in_mbps},
                       {"parts", m.parts}});
  }
  json assignment = json::object();
  for (std::size_t p = 0; p < model.processes().size(); ++p)
    assignment[model.processes()[p].id] = sol.modules.at(sol.process_module[p]).slot;
  json traffic = json::array();
  for (const auto& [key, t] : sol.traffic) {
    traffic.push_back({{"src_slot", sol.modules[key.first].slot},
                       {"dst_slot", sol.modules[key.second].slot},
                       {"mbps", t.mbps},
                       {"messages", t.messages}});
  }
  json violations = json::array();
  for (const Violation& v : sol.violations)
    violations.push_back({{"kind", to_string(v.kind)}, {"slot", v.slot}, {"magnitude", v.magnitude}});
  json doc = {{"feasible", sol.feasible},
              {"candidate_slots", sol.slot_count},
              {"module_cost", sol.cost()},
              {"modules", modules},
              {"process_assignment", assignment},
              {"inter_module_traffic", traffic},
              {"violations", violations}};
  return doc.dump(2) + "\n";
}

AllocationSolution parse_allocation(const std::string& json_text, const ApplicationModel& model) {
  try {
    const json doc = json::parse(json_text);
    AllocationSolution sol;
    sol.feasible = doc.value("feasible", false);
    sol.slot_count = doc.value("candidate_slots", std::size_t{0});
    std::map<int, std::size_t> by_slot;
    for (const json& jm : doc.at("modules")) {
      IncludedModule m;
      m.slot = jm.at("slot").get<int>();
      m.spec.type_name = jm.at("type_name").get<std::string>();
      m.spec.kind = ModuleKind::processing;
      m.spec.compute_mops = jm.at("compute_capacity_mops").get<double>();
      m.spec.link_mbps = jm.at("link_mbps").get<double>();
      m.spec.cost = jm.at("cost").get<double>();
      if (!by_slot.emplace(m.slot, sol.modules.size()).second)
        throw Error("allocation lists slot " + std::to_string(m.slot) + " twice");
      sol.modules.push_back(std::move(m));
    }
    const json& asg = doc.at("process_assignment");
    sol.process_module.assign(model.processes().size(), kExternal);
    for (std::size_t p = 0; p < model.processes().size(); ++p) {
      const Process& proc = model.processes()[p];
      auto it = asg.find(proc.id);
      if (it == asg.end()) throw Error("allocation does not place process " + proc.id);
      auto slot = by_slot.find(it->get<int>());
      if (slot == by_slot.end())
        throw Error("process " + proc.id + " is assigned to a slot that is not included");
      sol.process_module[p] = slot->second;
      IncludedModule& m = sol.modules[slot->second];
      m.compute_load += proc.compute_mops;
      if (std::find(m.parts.begin(), m.parts.end(), proc.part) == m.parts.end())
        m.parts.push_back(proc.part);
    }
    for (IncludedModule& m : sol.modules) std::sort(m.parts.begin(), m.parts.end());
    for (const Message& msg : model.messages()) {
      const std::size_t s = sol.process_module[msg.src_index];
      const std::size_t d = sol.process_module[msg.dst_index];
      if (s == d) continue;
      sol.modules[s].out_mbps += msg.bandwidth_mbps;
      sol.modules[d].in_mbps += msg.bandwidth_mbps;
      ModuleTraffic& t = sol.traffic[{s, d}];
      t.mbps += msg.bandwidth_mbps;
      ++t.messages;
    }
    for (const json& jv : doc.value("violations", json::array())) {
      const std::string kind = jv.at("kind").get<std::string>();
      ViolationKind k = ViolationKind::compute;
      for (ViolationKind c : {ViolationKind::excluded_slot, ViolationKind::compute,
                              ViolationKind::out_bandwidth, ViolationKind::in_bandwidth,
                              ViolationKind::part_mixing}) {
        if (to_string(c) == kind) k = c;
      }
      sol.violations.push_back({k, jv.at("slot").get<int>(), jv.at("magnitude").get<double>()});
    }
    return sol;
  } catch (const json::exception& e) {
    throw Error(std::string("allocation: ") + e.what());
  }
}

AllocationSolution load_allocation(const std::filesystem::path& path, const ApplicationModel& model) {
  try {
    return parse_allocation(read_text_file(path), model);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

}  // namespace netgap
