#pragma once

#include "netgap/config.hpp"
#include "netgap/model.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace netgap {

/// Two-part genome: which candidate slots exist, and which slot hosts each
/// process (position = process index, value = slot index).
struct AllocationGenome {
  std::vector<std::uint8_t> inclusion;
  std::vector<int> assignment;

  bool operator==(const AllocationGenome&) const = default;
};

enum class ViolationKind { excluded_slot, compute, out_bandwidth, in_bandwidth, part_mixing };

std::string to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  int slot;          // -1 for process-level violations
  double magnitude;  // Mops, Mbit/s, or a count
};

struct FeasibilityReport {
  bool feasible = true;
  std::vector<Violation> violations;
  double total_magnitude() const;
};

enum class FitnessPhase { primary, secondary };

/// Minimized; feasible genomes always rank ahead of infeasible ones.
struct Fitness {
  double score = 0.0;
  bool feasible = false;

  bool better_than(const Fitness& o) const {
    if (feasible != o.feasible) return feasible;
    return score < o.score;
  }
};

/// Candidate slots, capacities and message traffic for one allocation run.
///
/// Slot j uses the j-th processing type of the catalog, cycling when the
/// catalog lists several. `capacity_scale` multiplies compute and interface
/// capacities (the overload threshold when tightening is on).
class AllocationProblem {
public:
  AllocationProblem(const ApplicationModel& model, const ModuleCatalog& catalog,
                    std::size_t slots, double capacity_scale = 1.0);
  /// Restricts the problem to the given processes (indices into the model).
  AllocationProblem(const ApplicationModel& model, const ModuleCatalog& catalog,
                    std::size_t slots, double capacity_scale,
                    std::vector<std::size_t> process_subset);

  std::size_t slot_count() const { return slots_.size(); }
  std::size_t process_count() const { return processes_.size(); }
  const ModuleSpec& slot(std::size_t j) const { return slots_[j]; }
  /// Model index of the i-th process of this problem.
  std::size_t model_process(std::size_t i) const { return processes_[i]; }
  double demand(std::size_t i) const { return demand_[i]; }
  int part(std::size_t i) const { return part_[i]; }
  /// Compute capacity of slot j after scaling.
  double capacity(std::size_t j) const { return slots_[j].compute_mops * scale_; }
  double penalty_weight() const { return lambda_; }
  void set_penalty_weight(double lambda) { lambda_ = lambda; }

  FeasibilityReport check_feasibility(const AllocationGenome& genome) const;
  Fitness fitness(const AllocationGenome& genome, FitnessPhase phase) const;
  double module_cost(const AllocationGenome& genome) const;

  /// Total demand vs. total (scaled) capacity of all slots.
  bool infeasible_by_construction(std::string* why = nullptr) const;

private:
  struct Flow {
    std::size_t src;
    std::size_t dst;
    double mbps;
  };
  std::vector<ModuleSpec> slots_;
  std::vector<std::size_t> processes_;
  std::vector<double> demand_;
  std::vector<int> part_;
  std::size_t part_count_ = 0;
  std::vector<Flow> flows_;
  double scale_ = 1.0;
  double lambda_ = 0.0;

  void init(const ApplicationModel& model, const ModuleCatalog& catalog, std::size_t slots);
  void check_shape(const AllocationGenome& genome) const;
  struct Loads {
    std::vector<double> compute, out, in;
    std::vector<std::uint32_t> part_mask;
  };
  void loads(const AllocationGenome& genome, Loads& l) const;
};

// Convenience wrappers on the model/catalog directly (no tightening).
FeasibilityReport check_feasibility(const AllocationGenome& genome, const ApplicationModel& model,
                                    const ModuleCatalog& catalog);
Fitness fitness(const AllocationGenome& genome, const ApplicationModel& model,
                const ModuleCatalog& catalog, FitnessPhase phase);

struct IncludedModule {
  int slot = 0;
  ModuleSpec spec;
  double compute_load = 0.0;  // Mops
  double out_mbps = 0.0;
  double in_mbps = 0.0;
  std::vector<std::string> parts;

  double utilization() const { return compute_load / spec.compute_mops; }
};

struct ModuleTraffic {
  double mbps = 0.0;
  std::size_t messages = 0;
};

/// Result of the allocation stage: the modules to build and which process
/// runs where. Module ordinals index `modules` (ascending slot order).
struct AllocationSolution {
  std::vector<IncludedModule> modules;
  std::vector<std::size_t> process_module;  // per model process -> module ordinal
  std::map<std::pair<std::size_t, std::size_t>, ModuleTraffic> traffic;  // ordered module pairs
  bool feasible = false;
  std::vector<Violation> violations;
  std::size_t slot_count = 0;

  double cost() const;
  /// Module count per processing type name.
  std::map<std::string, std::size_t> type_counts() const;
};

/// Builds a solution record from a genome, dropping unused slots.
AllocationSolution make_solution(const AllocationProblem& problem, const AllocationGenome& genome,
                                 const ApplicationModel& model, std::size_t slot_offset = 0);

/// Thrown when the candidate slots cannot host the demand at all.
class InfeasibleAllocation : public Error {
public:
  using Error::Error;
};

struct Sp1Trace {
  double primary_best_cost = 0.0;
  bool primary_best_feasible = false;
  std::size_t primary_generations = 0;
  std::size_t secondary_generations = 0;
};

/// Genetic search over one problem: primary phase on both genome parts, then
/// the inclusion part is frozen and the assignment is rebalanced.
AllocationGenome run_allocation_ga(const AllocationProblem& problem, const Sp1Config& config,
                                   std::uint64_t seed, Sp1Trace* trace = nullptr);

AllocationSolution solve_sp1(const ApplicationModel& model, const ModuleCatalog& catalog,
                             const RunConfig& config, std::uint64_t seed,
                             Sp1Trace* trace = nullptr);

std::string dump_allocation(const AllocationSolution& solution, const ApplicationModel& model);
AllocationSolution parse_allocation(const std::string& json_text, const ApplicationModel& model);
AllocationSolution load_allocation(const std::filesystem::path& path, const ApplicationModel& model);

}  // namespace netgap
