#pragma once

#include "netgap/grammar.hpp"
#include "netgap/graph.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace netgap {

/// A rule together with the vertices its LHS pattern nodes are bound to.
///
/// `binding[i]` is the vertex matched by `rule.lhs.nodes[i]`; the binding in
/// pattern order is the action's signature. Symmetric bindings of the same
/// vertex set are distinct actions.
struct Action {
  std::size_t rule = 0;  // index into Grammar::rules
  std::vector<VertexId> binding;

  auto operator<=>(const Action&) const = default;
};

/// Human-readable form, e.g. "r3(4,7)".
std::string to_string(const Action& a, const Grammar& grammar);

/// True if `binding` is a valid match of `rule` in `g`: injective, labels
/// equal, every LHS arc present, every bound vertex's degree inside its
/// interval, and no arc the rule adds between preserved vertices already
/// present (the graph keeps at most one edge per ordered pair).
bool is_match(const TopologyGraph& g, const ProductionRule& rule,
              const std::vector<VertexId>& binding);

/// Every applicable (rule, binding) pair, ordered by rule then binding.
std::vector<Action> enumerate_actions(const TopologyGraph& g, const Grammar& grammar);

/// Same enumeration restricted to one rule.
void enumerate_rule_matches(const TopologyGraph& g, const Grammar& grammar, std::size_t rule,
                            std::vector<Action>& out);

/// Returns the rewritten graph; `g` is not modified. Throws Error if the
/// action is stale (no longer a valid match).
TopologyGraph apply_action(const TopologyGraph& g, const Grammar& grammar, const Action& a);

/// In-place variant used by rollouts.
void apply_action_in_place(TopologyGraph& g, const Grammar& grammar, const Action& a);

}  // namespace netgap
