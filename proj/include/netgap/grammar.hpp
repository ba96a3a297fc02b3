#pragma once

#include "netgap/graph.hpp"
#include "netgap/model.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace netgap {

class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
              what),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

struct DegreeInterval {
  int lo = 0;
  int hi = 0;
  bool contains(std::size_t d) const {
    return static_cast<long>(d) >= lo && static_cast<long>(d) <= hi;
  }
  bool operator==(const DegreeInterval&) const = default;
};

/// A node of a rule side. Two occurrences on the same side denote the same
/// pattern node iff label and index agree.
struct NodePattern {
  std::string label;
  std::optional<int> index;
  std::optional<DegreeInterval> degree;

  bool same_node(const NodePattern& o) const { return label == o.label && index == o.index; }
  std::string name() const;  // "S" or "S_1"
  bool operator==(const NodePattern&) const = default;
};

enum class EdgeDirection { directed, bidirectional };

struct EdgePattern {
  std::size_t src = 0;  // indices into RuleSide::nodes
  std::size_t dst = 0;
  EdgeDirection direction = EdgeDirection::directed;
  bool operator==(const EdgePattern&) const = default;
};

/// One comma-separated item as written: a node or a chain A -> B <-> C.
struct Chain {
  std::vector<std::size_t> nodes;
  std::vector<EdgeDirection> links;  // links.size() == nodes.size() - 1
  bool operator==(const Chain&) const = default;
};

struct RuleSide {
  std::vector<NodePattern> nodes;  // distinct pattern nodes, first-appearance order
  std::vector<EdgePattern> edges;
  std::vector<Chain> chains;

  bool empty() const { return nodes.empty(); }
  /// Directed arcs (a <-> b contributes both), sorted and unique.
  std::vector<std::pair<std::size_t, std::size_t>> arcs() const;
  bool operator==(const RuleSide&) const = default;
};

struct ProductionRule {
  std::string name;
  RuleSide lhs;
  RuleSide rhs;
  std::string comment;
  // Interface correspondence: rhs node index for each lhs node, if preserved.
  std::vector<std::optional<std::size_t>> lhs_to_rhs;
  // Single node rewritten into a single node of another type.
  bool relabel = false;

  bool operator==(const ProductionRule&) const = default;
};

struct Grammar {
  std::vector<ProductionRule> rules;
  TopologyGraph start_graph;

  const ProductionRule* find(const std::string& name) const;
};

/// Parses the topology grammar DSL.
///
///   rule    := [name ':'] side '=>' side ';'
///   side    := 'phi' | item (',' item)*
///   item    := node (('->' | '<->') node)*
///   node    := label ['_' digits] ['[' n ']' | '[' lo ('-'|',') hi ']']
///
/// '#' starts a comment running to the end of the line; a comment on the line
/// that terminates a rule is kept as that rule's comment. '⇒', '→', '↔' and
/// 'φ' are accepted as aliases. Throws ParseError with line and column.
Grammar parse_grammar(const std::string& text);
Grammar load_grammar(const std::filesystem::path& path);

std::string to_string(const RuleSide& side);
std::string to_string(const ProductionRule& rule);
std::string to_string(const Grammar& grammar);

struct RuleEffect {
  std::vector<std::string> added_nodes;
  std::vector<std::string> deleted_nodes;
  std::vector<std::pair<std::string, std::string>> relabeled;  // from, to
  std::vector<std::pair<std::string, std::string>> added_edges;
  std::vector<std::pair<std::string, std::string>> deleted_edges;
  // Degree conditions on matched nodes, e.g. {"G", [0,2]}.
  std::vector<std::pair<std::string, DegreeInterval>> degree_conditions;

  bool operator==(const RuleEffect&) const = default;
};

RuleEffect classify_rule(const ProductionRule& rule);
/// One-line summary such as "adds S; adds edges G->S, S->G".
std::string describe(const RuleEffect& effect);

}  // namespace netgap
