#include "netgap/rewrite.hpp"

#include <algorithm>
#include <optional>

namespace netgap {

namespace {

using Arc = std::pair<std::size_t, std::size_t>;

struct RuleInfo {
  std::vector<Arc> lhs_arcs;
  // RHS arcs between two preserved nodes that the LHS does not already
  // require, expressed in LHS node indices.
  std::vector<Arc> added_between_preserved;
  // LHS arcs whose endpoints are both preserved but which the RHS drops.
  std::vector<Arc> dropped_between_preserved;
  // RHS arcs with at least one new endpoint, in RHS node indices.
  std::vector<Arc> added_with_new;
  std::vector<std::optional<std::size_t>> rhs_to_lhs;
};

RuleInfo analyze(const ProductionRule& rule) {
  RuleInfo info;
  info.lhs_arcs = rule.lhs.arcs();
  const auto rhs_arcs = rule.rhs.arcs();
  info.rhs_to_lhs.assign(rule.rhs.nodes.size(), std::nullopt);
  for (std::size_t i = 0; i < rule.lhs_to_rhs.size(); ++i)
    if (rule.lhs_to_rhs[i]) info.rhs_to_lhs[*rule.lhs_to_rhs[i]] = i;
  for (auto [a, b] : rhs_arcs) {
    if (info.rhs_to_lhs[a] && info.rhs_to_lhs[b]) {
      const Arc l{*info.rhs_to_lhs[a], *info.rhs_to_lhs[b]};
      if (!std::binary_search(info.lhs_arcs.begin(), info.lhs_arcs.end(), l))
        info.added_between_preserved.push_back(l);
    } else {
      info.added_with_new.emplace_back(a, b);
    }
  }
  for (auto [a, b] : info.lhs_arcs) {
    if (!rule.lhs_to_rhs[a] || !rule.lhs_to_rhs[b]) continue;
    const Arc r{*rule.lhs_to_rhs[a], *rule.lhs_to_rhs[b]};
    if (!std::binary_search(rhs_arcs.begin(), rhs_arcs.end(), r))
      info.dropped_between_preserved.emplace_back(a, b);
  }
  return info;
}

bool node_fits(const TopologyGraph& g, const NodePattern& p, VertexId v) {
  if (g.label(v) != p.label) return false;
  return !p.degree || p.degree->contains(g.degree(v));
}

// Checks arcs whose endpoints are both among the first `bound` pattern nodes
// and involve pattern node `last`.
bool arcs_consistent(const TopologyGraph& g, const std::vector<Arc>& arcs,
                     const std::vector<VertexId>& binding, std::size_t last) {
  for (auto [a, b] : arcs) {
    if ((a == last && b <= last) || (b == last && a <= last)) {
      if (!g.has_edge(binding[a], binding[b])) return false;
    }
  }
  return true;
}

bool adds_no_parallel_edge(const TopologyGraph& g, const RuleInfo& info,
                           const std::vector<VertexId>& binding) {
  for (auto [a, b] : info.added_between_preserved)
    if (g.has_edge(binding[a], binding[b])) return false;
  return true;
}

void apply_unchecked(TopologyGraph& g, const ProductionRule& rule, const RuleInfo& info,
                     const std::vector<VertexId>& binding) {
  if (rule.relabel) {
    g.relabel(binding[0], rule.rhs.nodes[0].label);
    return;
  }
  for (auto [a, b] : info.dropped_between_preserved) g.remove_edge(binding[a], binding[b]);
  for (std::size_t i = 0; i < binding.size(); ++i)
    if (!rule.lhs_to_rhs[i]) g.remove_vertex(binding[i]);
  std::vector<VertexId> rhs_vertex(rule.rhs.nodes.size(), 0);
  for (std::size_t j = 0; j < rule.rhs.nodes.size(); ++j) {
    rhs_vertex[j] = info.rhs_to_lhs[j] ? binding[*info.rhs_to_lhs[j]]
                                       : g.add_vertex(rule.rhs.nodes[j].label);
  }
  for (auto [a, b] : info.added_between_preserved) g.add_edge(binding[a], binding[b]);
  for (auto [a, b] : info.added_with_new) g.add_edge(rhs_vertex[a], rhs_vertex[b]);
}

}  // namespace

std::string to_string(const Action& a, const Grammar& grammar) {
  std::string s = grammar.rules.at(a.rule).name + "(";
  for (std::size_t i = 0; i < a.binding.size(); ++i)
    s += (i ? "," : "") + std::to_string(a.binding[i]);
  return s + ")";
}

bool is_match(const TopologyGraph& g, const ProductionRule& rule,
              const std::vector<VertexId>& binding) {
  const auto& pats = rule.lhs.nodes;
  if (binding.size() != pats.size()) return false;
  for (std::size_t i = 0; i < binding.size(); ++i) {
    if (!g.has_vertex(binding[i]) || !node_fits(g, pats[i], binding[i])) return false;
    for (std::size_t j = 0; j < i; ++j)
      if (binding[j] == binding[i]) return false;
  }
  const RuleInfo info = analyze(rule);
  for (auto [a, b] : info.lhs_arcs)
    if (!g.has_edge(binding[a], binding[b])) return false;
  return adds_no_parallel_edge(g, info, binding);
}

void enumerate_rule_matches(const TopologyGraph& g, const Grammar& grammar, std::size_t r,
                            std::vector<Action>& out) {
  const ProductionRule& rule = grammar.rules.at(r);
  const auto& pats = rule.lhs.nodes;
  if (pats.empty()) {
    out.push_back({r, {}});
    return;
  }
  const RuleInfo info = analyze(rule);
  std::vector<std::vector<VertexId>> candidates(pats.size());
  for (std::size_t i = 0; i < pats.size(); ++i) {
    for (const Vertex& v : g.vertices())
      if (node_fits(g, pats[i], v.id)) candidates[i].push_back(v.id);
    if (candidates[i].empty()) return;
  }
  std::vector<VertexId> binding(pats.size(), 0);
  // Depth-first over pattern nodes; vertices ascend, so output is sorted.
  auto extend = [&](auto&& self, std::size_t depth) -> void {
    if (depth == pats.size()) {
      if (adds_no_parallel_edge(g, info, binding)) out.push_back({r, binding});
      return;
    }
    for (VertexId v : candidates[depth]) {
      if (std::find(binding.begin(), binding.begin() + static_cast<std::ptrdiff_t>(depth), v) !=
          binding.begin() + static_cast<std::ptrdiff_t>(depth)) {
        continue;
      }
      binding[depth] = v;
      if (!arcs_consistent(g, info.lhs_arcs, binding, depth)) continue;
      self(self, depth + 1);
    }
  };
  extend(extend, 0);
}

std::vector<Action> enumerate_actions(const TopologyGraph& g, const Grammar& grammar) {
  std::vector<Action> out;
  for (std::size_t r = 0; r < grammar.rules.size(); ++r) enumerate_rule_matches(g, grammar, r, out);
  return out;
}

void apply_action_in_place(TopologyGraph& g, const Grammar& grammar, const Action& a) {
  if (a.rule >= grammar.rules.size()) throw Error("action refers to an unknown rule");
  const ProductionRule& rule = grammar.rules[a.rule];
  if (!is_match(g, rule, a.binding))
    throw Error("stale action " + to_string(a, grammar) + ": binding is no longer a match");
  apply_unchecked(g, rule, analyze(rule), a.binding);
}

TopologyGraph apply_action(const TopologyGraph& g, const Grammar& grammar, const Action& a) {
  TopologyGraph out = g;
  apply_action_in_place(out, grammar, a);
  return out;
}

}  // namespace netgap
