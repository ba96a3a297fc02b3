#pragma once

#include "netgap/evaluate.hpp"
#include "netgap/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace netgap {

using Permutation = std::vector<std::size_t>;

/// Classic order crossover: the child keeps a[i..k] in place and takes the
/// remaining values in b's order, starting after k and wrapping around.
Permutation ordered_crossover(const Permutation& a, const Permutation& b, Rng& rng);
Permutation ordered_crossover(const Permutation& a, const Permutation& b, std::size_t i, std::size_t k);

/// Shuffles a random index interval in place.
void scramble_mutation(Permutation& p, Rng& rng);

bool is_permutation_of_iota(const Permutation& p);

/// Heuristic starting permutation: each part's modules go to one segment
/// where one fits, and within a segment the highest-traffic modules take the
/// best-connected processing vertices.
Permutation greedy_permutation(const TopologyGraph& topology, const ModuleCatalog& catalog,
                               const AllocationSolution& allocation,
                               const std::vector<VertexId>& processing);

struct Sp3Result {
  ModuleMapping mapping;
  EvaluationReport report;
  std::size_t evaluations = 0;
  bool searched = false;  // false when the topology could not host the allocation
};

Sp3Result solve_sp3(Evaluator& evaluator, const TopologyGraph& topology,
                    const ModuleCatalog& catalog, const AllocationSolution& allocation,
                    const Sp3Config& config, std::uint64_t seed);

Sp3Result solve_sp3(const TopologyGraph& topology, const AllocationSolution& allocation,
                    const ApplicationModel& model, const ModuleCatalog& catalog,
                    const RunConfig& config, std::uint64_t seed);

}  // namespace netgap
