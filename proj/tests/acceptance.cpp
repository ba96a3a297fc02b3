// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include "netgap/allocation.hpp"
#include "netgap/config.hpp"
#include "netgap/evaluate.hpp"
#include "netgap/grammar.hpp"
#include "netgap/mapping.hpp"
#include "netgap/mcts.hpp"
#include "netgap/report.hpp"
#include "netgap/rewrite.hpp"

#include "fuzz.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>

using namespace netgap;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

using Pairs = std::vector<std::pair<std::string, std::string>>;

Outcome grammar_fidelity() {
  Outcome o;
  const auto t0 = Clock::now();
  const Grammar g = load_grammar(testing::data_path("grammars/listing3_segmented_mesh.gg"));
  o.require(g.rules.size() == 5, "expected 5 rules");
  if (!o.pass) return o;
  const RuleEffect r0 = classify_rule(g.rules[0]), r1 = classify_rule(g.rules[1]),
                   r2 = classify_rule(g.rules[2]), r3 = classify_rule(g.rules[3]),
                   r4 = classify_rule(g.rules[4]);
  // "Adds a gateway node to an empty graph"
  o.require(g.rules[0].lhs.empty() && r0.added_nodes == std::vector<std::string>{"G"} && r0.added_edges.empty(),
            "r0 effect");
  // "Adds a switch S ... connects it to gateway G with a maximum of two connections"
  o.require(r1.added_nodes == std::vector<std::string>{"S"} && r1.added_edges == Pairs{{"G", "S"}, {"S", "G"}} &&
                r1.degree_conditions.size() == 1 && r1.degree_conditions[0].second == DegreeInterval{0, 2},
            "r1 effect");
  // "Adds a switch S_2 ... connects it to switch S_1"
  o.require(r2.added_nodes == std::vector<std::string>{"S_2"} &&
                r2.added_edges == Pairs{{"S_1", "S_2"}, {"S_2", "S_1"}} && r2.deleted_nodes.empty(),
            "r2 effect");
  // "Connects two previously unconnected switches S_1 and S_2"
  o.require(r3.added_nodes.empty() && r3.deleted_nodes.empty() &&
                r3.added_edges == Pairs{{"S_1", "S_2"}, {"S_2", "S_1"}} && r3.degree_conditions.size() == 2,
            "r3 effect");
  TopologyGraph two;
  two.add_vertex("S");
  two.add_vertex("S");
  two.add_edge(0, 1);
  two.add_edge(1, 0);
  o.require(!is_match(two, g.rules[3], {0, 1}), "r3 matched already connected switches");
  // "Adds module M ... connects it to switch S"
  o.require(r4.added_nodes == std::vector<std::string>{"M"} && r4.added_edges == Pairs{{"S", "M"}, {"M", "S"}},
            "r4 effect");
  const std::string text = to_string(g);
  const Grammar back = parse_grammar(text);
  o.require(back.rules == g.rules && to_string(back) == text, "round trip differs");
  const double t = seconds_since(t0);
  o.require(t < 1.0, "took " + fmt("%.3f s", t));
  if (o.pass) o.detail = "5 rules, effects match comments, round trip exact (" + fmt("%.4f s", t) + ")";
  return o;
}

Outcome rewrite_semantics() {
  Outcome o;
  const auto t0 = Clock::now();
  const Grammar gr = load_grammar(testing::data_path("grammars/listing4_examples.gg"));
  TopologyGraph g;
  g.add_vertex("A");
  g.add_vertex("B");
  g.add_vertex("C");
  g.add_edge(0, 1);
  g.add_edge(2, 1);
  using EdgeSet = std::set<std::pair<VertexId, VertexId>>;
  auto edges = [](const TopologyGraph& h) {
    EdgeSet s;
    for (const Edge& e : h.edges()) s.insert({e.src, e.dst});
    return s;
  };
  auto labels = [](const TopologyGraph& h) {
    std::map<VertexId, std::string> m;
    for (const Vertex& v : h.vertices()) m[v.id] = v.label;
    return m;
  };
  std::map<std::string, std::vector<TopologyGraph>> results;
  for (const Action& a : enumerate_actions(g, gr)) results[gr.rules[a.rule].name].push_back(apply_action(g, gr, a));
  auto one = [&](const std::string& r) -> const TopologyGraph* {
    auto it = results.find(r);
    if (it == results.end() || it->second.size() != 1) return nullptr;
    return &it->second[0];
  };
  using Labels = std::map<VertexId, std::string>;
  const TopologyGraph* r0 = one("r0");
  o.require(r0 && labels(*r0) == Labels{{0, "D"}, {1, "B"}, {2, "C"}} && edges(*r0) == EdgeSet{{0, 1}, {2, 1}},
            "r0: replaces A by D");
  const TopologyGraph* r1 = one("r1");
  o.require(r1 && edges(*r1) == EdgeSet{{0, 1}, {0, 2}, {2, 1}}, "r1: adds A -> C");
  const TopologyGraph* r2 = one("r2");
  o.require(r2 && edges(*r2) == EdgeSet{{2, 1}} && r2->vertex_count() == 3, "r2: removes A -> B");
  const TopologyGraph* r3 = one("r3");
  o.require(r3 && labels(*r3) == Labels{{0, "A"}, {2, "C"}, {3, "C"}} && edges(*r3) == EdgeSet{{0, 3}},
            "r3: removes B and C -> B, adds C and A -> C");
  const TopologyGraph* r4 = one("r4");
  o.require(r4 && edges(*r4) == EdgeSet{{0, 1}, {1, 2}, {2, 1}}, "r4: connects B to C");
  const TopologyGraph* r5 = one("r5");
  o.require(r5 && labels(*r5).at(3) == "B" && edges(*r5) == EdgeSet{{0, 1}, {0, 3}, {2, 1}, {3, 2}},
            "r5: adds B, A -> B and B -> C");
  o.require(!results.count("r6"), "r6 matched although deg A is 1");
  o.require(!results.count("r7"), "r7 matched without an edge between C vertices");
  TopologyGraph cc;
  cc.add_vertex("C");
  cc.add_vertex("C");
  cc.add_edge(0, 1);
  const auto acts = enumerate_actions(cc, gr);
  bool r7_ok = false;
  for (const Action& a : acts)
    if (gr.rules[a.rule].name == "r7")
      r7_ok = edges(apply_action(cc, gr, a)) == EdgeSet{{0, 2}, {2, 1}};
  o.require(r7_ok, "r7: adds a node B between C_1 and C_2");
  o.require(edges(g) == EdgeSet{{0, 1}, {2, 1}}, "input graph modified");
  const double t = seconds_since(t0);
  o.require(t < 1.0, "took " + fmt("%.3f s", t));
  if (o.pass) o.detail = "all eight rules behave as commented (" + fmt("%.4f s", t) + ")";
  return o;
}

Outcome latency_point() {
  Outcome o;
  const double v = latency_score(0.7988, 0, 3.33, 1, 1, 1);
  o.require(std::fabs(v - 0.7344) <= 1e-3, "l_s = " + fmt("%.6f", v));
  const double c = latency_score(0, 0, 2, 1, 1, 1);
  o.require(c == 1.0, "clamp gave " + fmt("%.6f", c));
  if (o.pass) o.detail = "l_s = " + fmt("%.4f", v) + ", clamped value " + fmt("%.1f", c);
  return o;
}

Outcome cost_point() {
  Outcome o;
  std::vector<Process> ps;
  for (int i = 0; i < 22; ++i) ps.push_back({"p" + std::to_string(i), "X", 10.0, 1.0});
  const ApplicationModel model(ps, {});
  AllocationProblem prob(model, table1_catalog(), 22, 1.0);
  AllocationGenome genome{std::vector<std::uint8_t>(22, 1), {}};
  for (int i = 0; i < 22; ++i) genome.assignment.push_back(i);
  const auto alloc = make_solution(prob, genome, model);
  TopologyGraph g;
  for (int i = 0; i < 22; ++i) g.add_vertex("M");
  for (int i = 0; i < 8; ++i) g.add_vertex("S");
  g.add_vertex("G");
  int links = 0;
  for (VertexId a = 0; a < 31 && links < 70; ++a)
    for (VertexId b = a + 1; b < 31 && links < 70; ++b, ++links) {
      g.add_edge(a, b);
      g.add_edge(b, a);
    }
  ModuleMapping m;
  for (VertexId v = 0; v < 22; ++v) m.module_vertex.push_back(v);
  const auto rep = evaluate(g, alloc, m, model, table1_catalog(), RunConfig{});
  o.require(rep.physical_links == 70, "link count");
  o.require(rep.cost == 317.0, "cost " + fmt("%.10g", rep.cost));
  if (o.pass) o.detail = "31 modules + 70 links cost " + fmt("%.1f", rep.cost) + "u";
  return o;
}

Outcome sp1_oracle() {
  Outcome o;
  const auto t0 = Clock::now();
  Rng rng(20240601);
  const ModuleCatalog cat = table1_catalog();
  int agree = 0, instances = 0, infeasible_returns = 0;
  while (instances < 20) {
    const ApplicationModel m = testing::small_allocation_model(rng);
    const std::size_t slots = 2 + uniform_index(rng, 3);
    RunConfig cfg;
    cfg.sp1.candidate_module_slots = static_cast<int>(slots);
    const auto inst = oracle::make_instance(m, cat, slots, cfg.reward.overload_threshold);
    const auto best = oracle::best_allocation_cost(inst);
    if (!best) continue;
    ++instances;
    Sp1Trace trace;
    const AllocationSolution sol = solve_sp1(m, cat, cfg, static_cast<std::uint64_t>(instances), &trace);
    AllocationProblem prob(m, cat, slots, cfg.reward.overload_threshold);
    AllocationGenome genome{std::vector<std::uint8_t>(slots, 0), {}};
    std::vector<int> assign;
    for (std::size_t p = 0; p < m.processes().size(); ++p) {
      const int slot = sol.modules[sol.process_module[p]].slot;
      genome.assignment.push_back(slot);
      genome.inclusion[static_cast<std::size_t>(slot)] = 1;
      assign.push_back(slot);
    }
    if (!prob.check_feasibility(genome).feasible || !oracle::feasible(inst, assign)) ++infeasible_returns;
    agree += trace.primary_best_feasible && trace.primary_best_cost == *best;
  }
  const double t = seconds_since(t0);
  o.require(agree >= 18, std::to_string(agree) + "/20 instances at the exhaustive optimum");
  o.require(infeasible_returns == 0, std::to_string(infeasible_returns) + " returned solutions infeasible");
  o.require(t < 120.0, "took " + fmt("%.1f s", t));
  if (o.pass)
    o.detail = std::to_string(agree) + "/20 at the exhaustive optimum, all feasible (" + fmt("%.1f s", t) + ")";
  return o;
}

Outcome disjoint_oracle() {
  Outcome o;
  const auto t0 = Clock::now();
  const ModuleCatalog cat = table1_catalog();
  Rng rng(4242);
  int graphs = 0, agree = 0, multi = 0;
  while (graphs < 50) {
    TopologyGraph g;
    const std::size_t k = 3 + uniform_index(rng, 6);
    for (std::size_t i = 0; i < k; ++i) g.add_vertex(bernoulli(rng, 0.85) ? "S" : "G");
    for (VertexId a = 0; a < k; ++a)
      for (VertexId b = a + 1; b < k; ++b) {
        if (!bernoulli(rng, 0.4)) continue;
        const double d = uniform01(rng);
        if (d < 0.8 || d < 0.9) g.add_edge(a, b);
        if (d < 0.8 || d >= 0.9) g.add_edge(b, a);
      }
    const VertexId s = g.add_vertex("M"), t = g.add_vertex("M");
    std::vector<VertexId> order(k);
    for (std::size_t i = 0; i < k; ++i) order[i] = static_cast<VertexId>(i);
    shuffle_range(order.begin(), order.end(), rng);
    const std::size_t ns = 1 + uniform_index(rng, std::min<std::size_t>(3, k - 1));
    const std::size_t nt = 1 + uniform_index(rng, std::min<std::size_t>(3, k - ns));
    for (std::size_t i = 0; i < ns; ++i) {
      g.add_edge(s, order[i]);
      g.add_edge(order[i], s);
    }
    for (std::size_t i = ns; i < ns + nt; ++i) {
      g.add_edge(t, order[i]);
      g.add_edge(order[i], t);
    }
    if (bernoulli(rng, 0.1)) {
      g.add_edge(s, t);
      g.add_edge(t, s);
    }
    if (bernoulli(rng, 0.3)) {
      const VertexId x = g.add_vertex("M");
      g.add_edge(x, order[uniform_index(rng, k)]);
      g.add_edge(order[uniform_index(rng, k)], x);
    }
    ++graphs;
    const int got = disjoint_paths(g, cat, s, t);
    const int want = oracle::disjoint_paths(g, cat, s, t);
    agree += got == want;
    multi += want >= 2;
  }
  const double t = seconds_since(t0);
  o.require(agree == graphs, std::to_string(agree) + "/" + std::to_string(graphs) + " agree");
  o.require(t < 60.0, "took " + fmt("%.1f s", t));
  if (o.pass)
    o.detail = "50/50 agree, " + std::to_string(multi) + " with two or more paths (" + fmt("%.2f s", t) + ")";
  return o;
}

Outcome sp3_oracle() {
  Outcome o;
  const auto t0 = Clock::now();
  const Grammar mesh = load_grammar(testing::data_path("grammars/mesh.gg"));
  const ModuleCatalog cat = table1_catalog();
  Rng rng(777);
  int hits = 0;
  for (int i = 0; i < 10; ++i) {
    const auto f = testing::sp3_instance(mesh, cat, rng);
    const double best = testing::exhaustive_sp3(f, cat);
    const Sp3Result res = solve_sp3(f.topology, f.allocation, f.model, cat, f.config, 1000 + i);
    hits += std::fabs(res.report.reward - best) <= 1e-12;
  }
  o.require(hits >= 9, std::to_string(hits) + "/10 at the exhaustive maximum");
  if (o.pass)
    o.detail = std::to_string(hits) + "/10 at the exhaustive maximum over 120 mappings (" +
               fmt("%.2f s", seconds_since(t0)) + ")";
  return o;
}

Outcome uct_check() {
  Outcome o;
  const std::size_t pick = uct_select({{1.0, 2.0}, {0.5, 1.0}}, 3.0, 2.8);
  o.require(pick == 1, "selected child " + std::to_string(pick + 1));
  Rng rng(8);
  int violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<SearchNode> tree(1);
    const std::size_t kids = uniform_index(rng, 5);
    for (std::size_t k = 0; k < kids; ++k) {
      SearchNode c;
      c.visits = static_cast<double>(1 + uniform_index(rng, 30));
      c.total_reward = c.visits * uniform01(rng);
      tree[0].visits += c.visits;
      tree[0].children.push_back(tree.size());
      tree.push_back(c);
    }
    const std::size_t untried = kids == 0 ? 1 + uniform_index(rng, 3) : uniform_index(rng, 3);
    for (std::size_t k = 0; k < untried; ++k) tree[0].untried.push_back({0, {static_cast<VertexId>(k)}});
    const SelectionStep s = select_step(tree[0], tree, 2.8, rng);
    if (untried > 0 && !(s.expand && s.index < untried)) ++violations;
    if (untried == 0 && s.expand) ++violations;
  }
  o.require(violations == 0, std::to_string(violations) + " fuzzed nodes revisited a child first");
  if (o.pass) o.detail = "child 2 selected; untried-first held on 1000 fuzzed nodes";
  return o;
}

struct EndToEnd {
  bool ran = false;
  std::string csv_a, csv_b;
  std::string error;
  SearchResult result;
  std::size_t sp1_modules = 0;
  double wall = 0.0;
};

EndToEnd run_case(std::uint64_t seed) {
  EndToEnd e;
  try {
    const ApplicationModel model = load_application_model(testing::data_path("usecases/fcp_mop_99.json"));
    const ModuleCatalog cat = load_module_catalog(testing::data_path("catalogs/table1.json"));
    const Grammar gr = load_grammar(testing::data_path("grammars/listing3_segmented_mesh.gg"));
    const RunConfig cfg = load_run_config(testing::data_path("configs/table2.json"));
    const auto t0 = Clock::now();
    const AllocationSolution alloc = solve_sp1(model, cat, cfg, seed);
    e.sp1_modules = alloc.modules.size();
    e.result = search(gr, alloc, model, cat, cfg, seed);
    e.wall = seconds_since(t0);
    e.csv_a = write_comparison_csv(comparison_rows(e.result, "run"));
    e.ran = true;
  } catch (const std::exception& ex) {
    e.error = ex.what();
  }
  return e;
}

Outcome end_to_end(const EndToEnd& e) {
  Outcome o;
  o.require(e.ran, "run failed: " + e.error);
  if (!o.pass) return o;
  const SearchResult& r = e.result;
  o.require(r.found, "no gate-passing candidate in " + std::to_string(r.epochs) + " epochs");
  if (!o.pass) return o;
  const EvaluationReport& b = r.best_report;
  o.require(b.segments == 2, std::to_string(b.segments) + " segments");
  o.require(b.mean_disjoint_paths >= 2.0, "mean disjoint paths " + fmt("%.3f", b.mean_disjoint_paths));
  o.require(b.max_node_load < 0.8, "max node load " + fmt("%.4f", b.max_node_load));
  o.require(b.x_l < 0.8, "max link load " + fmt("%.4f", b.x_l));
  o.require(b.processing_vertices == e.sp1_modules, "processing modules differ from the allocation");
  o.require(e.wall <= 1800.0, "took " + fmt("%.0f s", e.wall));
  std::size_t feasible = 0;
  for (const Candidate& c : r.candidates) feasible += c.report.gates.all() && c.report.routing_ok;
  if (o.pass) {
    std::ostringstream s;
    s << feasible << " gate-passing of " << r.candidates.size() << " candidates; best: " << b.processing_vertices
      << " M / " << b.switch_vertices << " S / " << b.gateway_vertices << " G, " << b.segments
      << " segments, mean disjoint paths " << fmt("%.3g", b.mean_disjoint_paths) << ", max node load "
      << fmt("%.4f", b.max_node_load) << ", max link load " << fmt("%.4f", b.x_l) << ", cost "
      << fmt("%.1f", b.cost) << "u, mean hops " << fmt("%.3g", b.h) << ", reward " << fmt("%.4f", b.reward)
      << " (" << fmt("%.1f s", e.wall) << ")";
    o.detail = s.str();
  }
  return o;
}

Outcome determinism(const EndToEnd& a, const EndToEnd& b) {
  Outcome o;
  o.require(a.ran && b.ran, "a run failed");
  o.require(!a.csv_a.empty() && a.csv_a == b.csv_a, "comparison.csv differs between runs");
  if (o.pass) o.detail = "comparison.csv byte-identical (" + std::to_string(a.csv_a.size()) + " bytes)";
  return o;
}

Outcome invariants() {
  Outcome o;
  const auto t0 = Clock::now();
  const Grammar gr = load_grammar(testing::data_path("grammars/listing3_segmented_mesh.gg"));
  const ModuleCatalog cat = table1_catalog();
  Rng rng(1000);
  int broken = 0, bijective = 0, passing = 0;
  std::string first;
  for (int i = 0; i < 1000; ++i) {
    const auto f = testing::random_instance(gr, cat, rng);
    const auto bad = testing::check_invariants(f, cat);
    if (!bad.empty() && first.empty()) first = bad[0];
    broken += !bad.empty();
    bijective += f.bijective;
    Evaluator ev(f.topology, f.model, cat, f.allocation, f.config);
    const auto rep = ev.evaluate(f.mapping);
    passing += rep.gates.all() && rep.routing_ok;
  }
  o.require(broken == 0, std::to_string(broken) + " evaluations broke an identity, e.g. " + first);
  if (o.pass)
    o.detail = "1000 evaluations (" + std::to_string(bijective) + " routed, " + std::to_string(passing) +
               " gate-passing) consistent (" + fmt("%.1f s", seconds_since(t0)) + ")";
  return o;
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int n, const char* name, const std::function<Outcome()>& f) {
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", n, name, o.detail.c_str());
    std::fflush(stdout);
  };
  report(1, "grammar fidelity", grammar_fidelity);
  report(2, "rewrite semantics", rewrite_semantics);
  report(3, "latency score point check", latency_point);
  report(4, "cost point check", cost_point);
  report(5, "allocation oracle", sp1_oracle);
  report(6, "disjoint path oracle", disjoint_oracle);
  report(7, "mapping oracle", sp3_oracle);
  report(8, "uct selection", uct_check);
  const EndToEnd first = run_case(1);
  report(9, "end-to-end synthetic use case", [&] { return end_to_end(first); });
  const EndToEnd second = run_case(1);
  report(10, "determinism", [&] { return determinism(first, second); });
  report(11, "evaluation invariants", invariants);
  return failed ? 1 : 0;
}
