#pragma once

#include "netgap/allocation.hpp"
#include "netgap/config.hpp"
#include "netgap/evaluate.hpp"
#include "netgap/grammar.hpp"
#include "netgap/rewrite.hpp"
#include "netgap/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace netgap {

struct SearchNode {
  TopologyGraph graph;
  std::optional<Action> action;  // from the parent; empty at the root
  std::size_t parent = 0;
  std::vector<std::size_t> children;  // indices into the tree arena
  std::vector<Action> untried;
  double visits = 0.0;        // N
  double total_reward = 0.0;  // W
  std::size_t own_visits = 0;  // epochs whose rollout started here
  double own_reward = 0.0;
  bool dead = false;          // cannot lead to a terminal graph
  bool terminal = false;      // graph itself satisfies the terminal predicate
  std::optional<double> terminal_reward;
};

struct ChildStats {
  double total_reward = 0.0;
  double visits = 0.0;
};

/// argmax_i W_i/N_i + c sqrt(ln N_parent / N_i); ties go to the lowest index.
/// Every child must have N_i >= 1.
std::size_t uct_select(const std::vector<ChildStats>& children, double parent_visits, double c);

struct SelectionStep {
  bool expand = false;       // true: expand untried[index]; false: descend to children[index]
  std::size_t index = 0;
  bool leaf = false;         // nothing to expand and no children
};

/// One selection decision at `node`: an untried action (chosen with `rng`)
/// always takes precedence over revisiting a child.
SelectionStep select_step(const SearchNode& node, const std::vector<SearchNode>& tree, double c,
                          Rng& rng);

/// Processing-vertex counts per type equal `required` and every processing
/// vertex reaches every other one (through non-processing vertices).
bool is_terminal(const TopologyGraph& g, const ModuleCatalog& catalog,
                 const std::map<std::string, std::size_t>& required);

struct RolloutResult {
  bool success = false;
  TopologyGraph graph;
  std::size_t steps = 0;
  std::string failure;  // "depth cap", "dead end", "overshoot"
};

/// Labels some rule of the grammar can remove (by deletion or relabeling).
std::vector<std::string> removable_labels(const Grammar& grammar);

/// Applies uniformly random enumerated actions until the graph is terminal,
/// no action applies, a processing label no rule can remove overshoots its
/// required count, or `depth_cap` actions have been applied.
RolloutResult rollout(const TopologyGraph& start, const Grammar& grammar, const ModuleCatalog& catalog,
                      const std::map<std::string, std::size_t>& required, std::size_t depth_cap,
                      Rng& rng);

std::size_t default_depth_cap(const AllocationSolution& allocation);

struct Candidate {
  std::size_t id = 0;
  std::size_t epoch = 0;
  std::size_t rollout_steps = 0;
  double wall_time_s = 0.0;
  EvaluationReport report;
};

struct ProgressEvent {
  std::size_t epoch = 0;
  double best_reward = 0.0;
  std::size_t candidates = 0;
  std::size_t feasible_candidates = 0;
  std::size_t tree_size = 0;
  std::size_t failed_rollouts = 0;
  double elapsed_s = 0.0;
};

struct SearchResult {
  bool found = false;  // a gate-passing candidate exists
  std::optional<TopologyGraph> best_topology;
  ModuleMapping best_mapping;
  EvaluationReport best_report;
  std::optional<std::size_t> best_candidate;
  std::vector<Candidate> candidates;
  std::size_t epochs = 0;
  std::size_t tree_size = 0;
  std::size_t failed_rollouts = 0;
  double wall_time_s = 0.0;
  std::map<std::string, std::size_t> failure_counts;
  std::vector<SearchNode> tree;  // only with SearchOptions::keep_tree
};

struct SearchOptions {
  std::optional<TopologyGraph> start_graph;  // defaults to the grammar's start graph
  std::function<void(const ProgressEvent&)> on_progress;
  std::size_t threads = 1;  // workers for parallel rollouts
  bool keep_tree = false;
};

SearchResult search(const Grammar& grammar, const AllocationSolution& allocation,
                    const ApplicationModel& model, const ModuleCatalog& catalog,
                    const RunConfig& config, std::uint64_t seed, const SearchOptions& options = {});

std::string dump_search_summary(const SearchResult& result);

}  // namespace netgap
