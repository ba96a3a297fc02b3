#include "netgap/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace netgap {

namespace {

bool is_letter(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_ident(char c) { return is_letter(c) || is_digit(c) || c == '_'; }

// Raw node occurrence before pattern nodes are deduplicated.
struct NodeRef {
  NodePattern pattern;
  std::size_t line = 0;
  std::size_t column = 0;
};

struct RawChain {
  std::vector<NodeRef> nodes;
  std::vector<EdgeDirection> links;
};

class Parser {
public:
  explicit Parser(const std::string& text) : text_(text) {}

  Grammar parse() {
    Grammar g;
    std::set<std::string> names;
    for (;;) {
      skip_blank();
      if (eof()) break;
      ProductionRule rule = parse_rule(g.rules.size());
      if (!names.insert(rule.name).second)
        throw ParseError("duplicate rule name '" + rule.name + "'", rule_line_, rule_column_);
      g.rules.push_back(std::move(rule));
    }
    return g;
  }

private:
  const std::string& text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
  std::size_t rule_line_ = 1;
  std::size_t rule_column_ = 1;

  bool eof() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }
  bool starts_with(std::string_view s) const {
    return text_.compare(pos_, s.size(), s) == 0;
  }

  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < text_.size(); ++i, ++pos_) {
      const unsigned char c = static_cast<unsigned char>(text_[pos_]);
      if (c == '\n') {
        ++line_;
        column_ = 1;
      } else if ((c & 0xC0) != 0x80) {
        ++column_;  // count code points, not UTF-8 continuation bytes
      }
    }
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_, column_); }

  std::string rest_of_line() {
    const std::size_t start = pos_;
    while (!eof() && peek() != '\n') advance();
    return text_.substr(start, pos_ - start);
  }

  // Whitespace, newlines and whole-line comments.
  void skip_blank() {
    while (!eof()) {
      if (std::isspace(static_cast<unsigned char>(peek()))) {
        advance();
      } else if (peek() == '#') {
        rest_of_line();
      } else {
        break;
      }
    }
  }

  bool accept(std::string_view tok) {
    skip_blank();
    if (!starts_with(tok)) return false;
    advance(tok.size());
    return true;
  }

  bool accept_production_arrow() { return accept("=>") || accept("\xE2\x87\x92"); }

  ProductionRule parse_rule(std::size_t ordinal) {
    rule_line_ = line_;
    rule_column_ = column_;
    ProductionRule rule;
    rule.name = "r" + std::to_string(ordinal);

    // Optional "name:" prefix.
    {
      const std::size_t save_pos = pos_, save_line = line_, save_col = column_;
      std::size_t end = pos_;
      while (end < text_.size() && is_ident(text_[end])) ++end;
      if (end > pos_) {
        std::string ident = text_.substr(pos_, end - pos_);
        advance(end - pos_);
        while (peek() == ' ' || peek() == '\t') advance();
        if (peek() == ':') {
          advance();
          rule.name = std::move(ident);
        } else {
          pos_ = save_pos;
          line_ = save_line;
          column_ = save_col;
        }
      }
    }

    std::vector<RawChain> lhs = parse_side(/*lhs=*/true);
    if (!accept_production_arrow()) fail("expected '=>'");
    std::vector<RawChain> rhs = parse_side(/*lhs=*/false);
    if (!accept(";")) fail("expected ';'");

    // Trailing comment on the same line belongs to this rule.
    while (peek() == ' ' || peek() == '\t') advance();
    if (peek() == '#') {
      advance();
      std::string c = rest_of_line();
      const auto b = c.find_first_not_of(" \t");
      const auto e = c.find_last_not_of(" \t\r");
      rule.comment = b == std::string::npos ? std::string{} : c.substr(b, e - b + 1);
    }

    rule.lhs = build_side(lhs);
    rule.rhs = build_side(rhs);
    link_sides(rule);
    return rule;
  }

  bool at_phi() {
    skip_blank();
    if (starts_with("\xCF\x86")) {
      advance(2);
      return true;
    }
    if (starts_with("phi") && !is_ident(peek(3))) {
      advance(3);
      return true;
    }
    return false;
  }

  std::vector<RawChain> parse_side(bool lhs) {
    std::vector<RawChain> chains;
    if (at_phi()) return chains;
    do {
      chains.push_back(parse_chain());
    } while (accept(","));
    (void)lhs;
    return chains;
  }

  RawChain parse_chain() {
    RawChain chain;
    chain.nodes.push_back(parse_node());
    for (;;) {
      if (accept("<->") || accept("\xE2\x86\x94")) {
        chain.links.push_back(EdgeDirection::bidirectional);
      } else if (accept("->") || accept("\xE2\x86\x92")) {
        chain.links.push_back(EdgeDirection::directed);
      } else {
        break;
      }
      chain.nodes.push_back(parse_node());
    }
    return chain;
  }

  int parse_number() {
    skip_blank();
    if (!is_digit(peek())) fail("expected a number");
    long v = 0;
    while (is_digit(peek())) {
      v = v * 10 + (peek() - '0');
      if (v > 1000000) fail("number too large");
      advance();
    }
    return static_cast<int>(v);
  }

  NodeRef parse_node() {
    skip_blank();
    NodeRef ref;
    ref.line = line_;
    ref.column = column_;
    if (!is_letter(peek())) fail("expected a node type label");
    while (is_letter(peek())) {
      ref.pattern.label.push_back(peek());
      advance();
    }
    if (peek() == '_') {
      advance();
      if (!is_digit(peek())) fail("expected a node index after '_'");
      const int idx = parse_number();
      if (idx < 1) fail("node index must be a positive integer");
      ref.pattern.index = idx;
    } else if (is_digit(peek())) {
      fail("type labels contain letters only; write indices as LABEL_N");
    }
    if (accept("[")) {
      DegreeInterval d;
      d.lo = parse_number();
      d.hi = d.lo;
      if (accept("-") || accept(",")) d.hi = parse_number();
      if (!accept("]")) fail("expected ']'");
      if (d.lo > d.hi) {
        throw ParseError("degree interval has lo > hi", ref.line, ref.column);
      }
      ref.pattern.degree = d;
    }
    return ref;
  }

  RuleSide build_side(const std::vector<RawChain>& raw) {
    RuleSide side;
    auto intern = [&](const NodeRef& ref) {
      for (std::size_t i = 0; i < side.nodes.size(); ++i) {
        NodePattern& existing = side.nodes[i];
        if (!existing.same_node(ref.pattern)) continue;
        if (ref.pattern.degree) {
          if (existing.degree && existing.degree != ref.pattern.degree) {
            throw ParseError("conflicting degree intervals for " + existing.name(), ref.line,
                             ref.column);
          }
          existing.degree = ref.pattern.degree;
        }
        return i;
      }
      side.nodes.push_back(ref.pattern);
      return side.nodes.size() - 1;
    };
    for (const RawChain& rc : raw) {
      Chain chain;
      for (const NodeRef& ref : rc.nodes) chain.nodes.push_back(intern(ref));
      chain.links = rc.links;
      for (std::size_t k = 0; k < chain.links.size(); ++k) {
        const std::size_t a = chain.nodes[k];
        const std::size_t b = chain.nodes[k + 1];
        if (a == b) {
          throw ParseError("edge from " + side.nodes[a].name() + " to itself", rc.nodes[k].line,
                           rc.nodes[k].column);
        }
        EdgePattern e{a, b, chain.links[k]};
        if (std::find(side.edges.begin(), side.edges.end(), e) == side.edges.end())
          side.edges.push_back(e);
      }
      side.chains.push_back(std::move(chain));
    }
    return side;
  }

  void link_sides(ProductionRule& rule) {
    rule.lhs_to_rhs.assign(rule.lhs.nodes.size(), std::nullopt);
    for (std::size_t i = 0; i < rule.lhs.nodes.size(); ++i) {
      for (std::size_t j = 0; j < rule.rhs.nodes.size(); ++j) {
        if (rule.lhs.nodes[i].same_node(rule.rhs.nodes[j])) {
          rule.lhs_to_rhs[i] = j;
          break;
        }
      }
    }
    rule.relabel = rule.lhs.nodes.size() == 1 && rule.rhs.nodes.size() == 1 &&
                   rule.lhs.edges.empty() && rule.rhs.edges.empty() && !rule.lhs_to_rhs[0];
    if (rule.relabel) rule.lhs_to_rhs[0] = 0;
  }
};

std::string node_text(const NodePattern& n, bool with_degree) {
  std::string s = n.name();
  if (with_degree && n.degree) {
    s += "[" + std::to_string(n.degree->lo);
    if (n.degree->hi != n.degree->lo) s += "-" + std::to_string(n.degree->hi);
    s += "]";
  }
  return s;
}

}  // namespace

std::string NodePattern::name() const {
  return index ? label + "_" + std::to_string(*index) : label;
}

std::vector<std::pair<std::size_t, std::size_t>> RuleSide::arcs() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const EdgePattern& e : edges) {
    out.emplace_back(e.src, e.dst);
    if (e.direction == EdgeDirection::bidirectional) out.emplace_back(e.dst, e.src);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

const ProductionRule* Grammar::find(const std::string& name) const {
  for (const ProductionRule& r : rules)
    if (r.name == name) return &r;
  return nullptr;
}

Grammar parse_grammar(const std::string& text) { return Parser(text).parse(); }

Grammar load_grammar(const std::filesystem::path& path) {
  try {
    return parse_grammar(read_text_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line(), e.column());
  }
}

std::string to_string(const RuleSide& side) {
  if (side.empty()) return "phi";
  std::vector<bool> printed(side.nodes.size(), false);
  std::string out;
  for (std::size_t c = 0; c < side.chains.size(); ++c) {
    if (c > 0) out += ", ";
    const Chain& chain = side.chains[c];
    for (std::size_t k = 0; k < chain.nodes.size(); ++k) {
      if (k > 0)
        out += chain.links[k - 1] == EdgeDirection::bidirectional ? " <-> " : " -> ";
      const std::size_t n = chain.nodes[k];
      out += node_text(side.nodes[n], !printed[n]);
      printed[n] = true;
    }
  }
  return out;
}

std::string to_string(const ProductionRule& rule) {
  std::string s = rule.name + ": " + to_string(rule.lhs) + " => " + to_string(rule.rhs) + ";";
  if (!rule.comment.empty()) s += "  # " + rule.comment;
  return s;
}

std::string to_string(const Grammar& grammar) {
  std::string s;
  for (const ProductionRule& r : grammar.rules) s += to_string(r) + "\n";
  return s;
}

RuleEffect classify_rule(const ProductionRule& rule) {
  RuleEffect fx;
  const RuleSide& L = rule.lhs;
  const RuleSide& R = rule.rhs;
  std::vector<std::optional<std::size_t>> rhs_to_lhs(R.nodes.size());
  for (std::size_t i = 0; i < L.nodes.size(); ++i) {
    if (rule.lhs_to_rhs[i]) rhs_to_lhs[*rule.lhs_to_rhs[i]] = i;
  }
  for (std::size_t i = 0; i < L.nodes.size(); ++i) {
    if (L.nodes[i].degree) fx.degree_conditions.emplace_back(L.nodes[i].name(), *L.nodes[i].degree);
    if (!rule.lhs_to_rhs[i]) {
      fx.deleted_nodes.push_back(L.nodes[i].name());
    } else if (rule.relabel) {
      fx.relabeled.emplace_back(L.nodes[i].name(), R.nodes[*rule.lhs_to_rhs[i]].name());
    }
  }
  for (std::size_t j = 0; j < R.nodes.size(); ++j)
    if (!rhs_to_lhs[j]) fx.added_nodes.push_back(R.nodes[j].name());

  const auto lhs_arcs = L.arcs();
  const auto rhs_arcs = R.arcs();
  for (auto [a, b] : rhs_arcs) {
    const bool preserved = rhs_to_lhs[a] && rhs_to_lhs[b] &&
                           std::binary_search(lhs_arcs.begin(), lhs_arcs.end(),
                                              std::make_pair(*rhs_to_lhs[a], *rhs_to_lhs[b]));
    if (!preserved) fx.added_edges.emplace_back(R.nodes[a].name(), R.nodes[b].name());
  }
  for (auto [a, b] : lhs_arcs) {
    const bool preserved = rule.lhs_to_rhs[a] && rule.lhs_to_rhs[b] &&
                           std::binary_search(rhs_arcs.begin(), rhs_arcs.end(),
                                              std::make_pair(*rule.lhs_to_rhs[a],
                                                             *rule.lhs_to_rhs[b]));
    if (!preserved) fx.deleted_edges.emplace_back(L.nodes[a].name(), L.nodes[b].name());
  }
  return fx;
}

std::string describe(const RuleEffect& fx) {
  std::vector<std::string> parts;
  auto join_nodes = [](const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
    return s;
  };
  auto join_edges = [](const std::vector<std::pair<std::string, std::string>>& v,
                       const char* sep) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i].first + sep + v[i].second;
    return s;
  };
  for (const auto& [name, d] : fx.degree_conditions) {
    parts.push_back("requires deg " + name + " in [" + std::to_string(d.lo) + "," +
                    std::to_string(d.hi) + "]");
  }
  if (!fx.relabeled.empty()) parts.push_back("relabels " + join_edges(fx.relabeled, " to "));
  if (!fx.deleted_nodes.empty()) parts.push_back("removes " + join_nodes(fx.deleted_nodes));
  if (!fx.deleted_edges.empty()) parts.push_back("removes edges " + join_edges(fx.deleted_edges, "->"));
  if (!fx.added_nodes.empty()) parts.push_back("adds " + join_nodes(fx.added_nodes));
  if (!fx.added_edges.empty()) parts.push_back("adds edges " + join_edges(fx.added_edges, "->"));
  if (parts.empty()) return "no effect";
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? "; " : "") + parts[i];
  return s;
}

}  // namespace netgap
