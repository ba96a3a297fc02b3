#pragma once

// Slow, straightforward reference implementations the library is checked
// against. Nothing here calls into the code under test except for plain data
// accessors.

#include "netgap/allocation.hpp"
#include "netgap/evaluate.hpp"
#include "netgap/grammar.hpp"
#include "netgap/graph.hpp"
#include "netgap/model.hpp"
#include "netgap/rewrite.hpp"
#include "netgap/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using netgap::VertexId;

inline std::size_t naive_degree(const netgap::TopologyGraph& g, VertexId v) {
  std::set<VertexId> nb;
  for (const netgap::Edge& e : g.edges()) {
    if (e.src == v) nb.insert(e.dst);
    if (e.dst == v) nb.insert(e.src);
  }
  return nb.size();
}

inline bool naive_has_edge(const netgap::TopologyGraph& g, VertexId a, VertexId b) {
  for (const netgap::Edge& e : g.edges())
    if (e.src == a && e.dst == b) return true;
  return false;
}

inline std::set<std::pair<std::size_t, std::size_t>> side_arcs(const netgap::RuleSide& side) {
  std::set<std::pair<std::size_t, std::size_t>> arcs;
  for (const netgap::EdgePattern& e : side.edges) {
    arcs.insert({e.src, e.dst});
    if (e.direction == netgap::EdgeDirection::bidirectional) arcs.insert({e.dst, e.src});
  }
  return arcs;
}

// Every (rule, binding) pair by trying all injective vertex tuples.
inline std::set<std::pair<std::size_t, std::vector<VertexId>>> all_actions(const netgap::TopologyGraph& g,
                                                                           const netgap::Grammar& gr) {
  std::set<std::pair<std::size_t, std::vector<VertexId>>> out;
  std::vector<VertexId> ids;
  for (const netgap::Vertex& v : g.vertices()) ids.push_back(v.id);

  for (std::size_t r = 0; r < gr.rules.size(); ++r) {
    const netgap::ProductionRule& rule = gr.rules[r];
    const auto& lhs = rule.lhs.nodes;
    const auto lhs_arcs = side_arcs(rule.lhs);
    // rhs node -> lhs node with the same label and index
    std::map<std::size_t, std::size_t> back;
    for (std::size_t b = 0; b < rule.rhs.nodes.size(); ++b)
      for (std::size_t a = 0; a < lhs.size(); ++a)
        if (rule.rhs.nodes[b].label == lhs[a].label && rule.rhs.nodes[b].index == lhs[a].index) back[b] = a;
    std::vector<std::pair<std::size_t, std::size_t>> added;
    for (auto [x, y] : side_arcs(rule.rhs)) {
      if (!back.count(x) || !back.count(y)) continue;
      std::pair<std::size_t, std::size_t> p{back[x], back[y]};
      if (!lhs_arcs.count(p)) added.push_back(p);
    }

    if (lhs.empty()) {
      out.insert({r, {}});
      continue;
    }
    std::vector<VertexId> pick(lhs.size());
    std::function<void(std::size_t)> rec = [&](std::size_t k) {
      if (k == lhs.size()) {
        for (auto [a, b] : lhs_arcs)
          if (!naive_has_edge(g, pick[a], pick[b])) return;
        for (auto [a, b] : added)
          if (naive_has_edge(g, pick[a], pick[b])) return;
        out.insert({r, pick});
        return;
      }
      for (VertexId v : ids) {
        if (std::find(pick.begin(), pick.begin() + static_cast<long>(k), v) != pick.begin() + static_cast<long>(k))
          continue;
        if (g.label(v) != lhs[k].label) continue;
        if (lhs[k].degree) {
          const auto d = static_cast<long>(naive_degree(g, v));
          if (d < lhs[k].degree->lo || d > lhs[k].degree->hi) continue;
        }
        pick[k] = v;
        rec(k + 1);
      }
    };
    rec(0);
  }
  return out;
}

// Disjoint paths ----------------------------------------------------------

// Enumerates simple src->dst paths whose intermediates are infrastructure
// vertices, reduces each to the resources it uses exclusively, and finds the
// largest conflict-free subset by backtracking. Returns kSwitchLocal when the
// endpoints share an infrastructure neighbour.
inline int disjoint_paths(const netgap::TopologyGraph& g, const netgap::ModuleCatalog& catalog, VertexId s,
                          VertexId t) {
  auto infra = [&](VertexId v) { return catalog.at(g.label(v)).kind != netgap::ModuleKind::processing; };
  std::set<VertexId> ns, nt;
  for (const netgap::Edge& e : g.edges()) {
    if (e.src == s) ns.insert(e.dst);
    if (e.dst == s) ns.insert(e.src);
    if (e.src == t) nt.insert(e.dst);
    if (e.dst == t) nt.insert(e.src);
  }
  for (VertexId v : ns)
    if (nt.count(v) && infra(v)) return netgap::kSwitchLocal;
  auto exempt = [&](VertexId v) { return ns.count(v) || nt.count(v); };

  std::map<VertexId, std::vector<VertexId>> out;
  for (const netgap::Edge& e : g.edges()) out[e.src].push_back(e.dst);

  // resources: vertex v -> (v, v); arc a->b -> (a, b)
  using Res = std::set<std::pair<VertexId, VertexId>>;
  std::set<Res> found;
  std::vector<VertexId> path{s};
  std::function<void(VertexId)> dfs = [&](VertexId u) {
    for (VertexId w : out[u]) {
      if (std::find(path.begin(), path.end(), w) != path.end()) continue;
      if (w != t && !infra(w)) continue;
      path.push_back(w);
      if (w == t) {
        Res r;
        for (std::size_t k = 0; k + 1 < path.size(); ++k) {
          const VertexId a = path[k], b = path[k + 1];
          if (infra(a) == infra(b)) r.insert({a, b});
          if (k > 0 && !exempt(a)) r.insert({a, a});
        }
        found.insert(r);
      } else {
        dfs(w);
      }
      path.pop_back();
    }
  };
  dfs(s);

  std::vector<Res> paths;
  for (const Res& r : found) {
    bool dominated = false;
    for (const Res& q : found)
      if (q != r && std::includes(r.begin(), r.end(), q.begin(), q.end())) dominated = true;
    if (!dominated) paths.push_back(r);
  }
  // an empty resource set can be reused any number of times
  for (const Res& r : paths)
    if (r.empty()) return static_cast<int>(g.vertex_count()) + 1;

  int best = 0;
  Res used;
  std::function<void(std::size_t, int)> pack = [&](std::size_t i, int count) {
    best = std::max(best, count);
    if (count + static_cast<int>(paths.size() - i) <= best) return;
    for (std::size_t k = i; k < paths.size(); ++k) {
      bool clash = false;
      for (const auto& x : paths[k])
        if (used.count(x)) clash = true;
      if (clash) continue;
      for (const auto& x : paths[k]) used.insert(x);
      pack(k + 1, count + 1);
      for (const auto& x : paths[k]) used.erase(x);
    }
  };
  pack(0, 0);
  return best;
}

// Allocation ----------------------------------------------------------------

struct AllocInstance {
  std::vector<double> demand;
  std::vector<int> part;
  struct Flow {
    std::size_t src, dst;
    double mbps;
  };
  std::vector<Flow> flows;
  std::vector<double> compute_cap, link_cap, cost;
};

inline AllocInstance make_instance(const netgap::ApplicationModel& model, const netgap::ModuleCatalog& catalog,
                                   std::size_t slots, double scale) {
  AllocInstance in;
  std::map<std::string, int> part_id;
  for (const netgap::Process& p : model.processes()) {
    in.demand.push_back(p.compute_mops);
    part_id.emplace(p.part, static_cast<int>(part_id.size()));
    in.part.push_back(part_id[p.part]);
  }
  for (const netgap::Message& m : model.messages()) {
    in.flows.push_back({*model.process_index(m.src), *model.process_index(m.dst),
                        m.size_bits / (m.period_ms * 1000.0)});
  }
  std::vector<const netgap::ModuleSpec*> types;
  for (const auto& t : catalog.types())
    if (t.kind == netgap::ModuleKind::processing) types.push_back(&t);
  for (std::size_t j = 0; j < slots; ++j) {
    const netgap::ModuleSpec& t = *types[j % types.size()];
    in.compute_cap.push_back(t.compute_mops * scale);
    in.link_cap.push_back(t.link_mbps * scale);
    in.cost.push_back(t.cost);
  }
  return in;
}

inline bool feasible(const AllocInstance& in, const std::vector<int>& assign) {
  const std::size_t q = in.compute_cap.size();
  std::vector<double> cpu(q, 0.0), out(q, 0.0), inn(q, 0.0);
  std::vector<std::set<int>> parts(q);
  for (std::size_t i = 0; i < assign.size(); ++i) {
    cpu[assign[i]] += in.demand[i];
    parts[assign[i]].insert(in.part[i]);
  }
  for (const auto& f : in.flows) {
    if (assign[f.src] == assign[f.dst]) continue;
    out[assign[f.src]] += f.mbps;
    inn[assign[f.dst]] += f.mbps;
  }
  for (std::size_t j = 0; j < q; ++j) {
    if (cpu[j] > in.compute_cap[j] + 1e-9) return false;
    if (out[j] > in.link_cap[j] + 1e-9 || inn[j] > in.link_cap[j] + 1e-9) return false;
    if (parts[j].size() > 1) return false;
  }
  return true;
}

// Cheapest feasible assignment over all slot^process combinations; only
// slots that host something are paid for.
inline std::optional<double> best_allocation_cost(const AllocInstance& in) {
  const std::size_t n = in.demand.size(), q = in.compute_cap.size();
  std::vector<int> assign(n, 0);
  std::optional<double> best;
  while (true) {
    if (feasible(in, assign)) {
      std::set<int> used(assign.begin(), assign.end());
      double c = 0.0;
      for (int j : used) c += in.cost[static_cast<std::size_t>(j)];
      if (!best || c < *best) best = c;
    }
    std::size_t k = 0;
    while (k < n && ++assign[k] == static_cast<int>(q)) assign[k++] = 0;
    if (k == n) break;
  }
  return best;
}

// Latency -----------------------------------------------------------------

inline double latency(double x_l, int o, double h, double alpha, double beta, double gamma) {
  if (h == 0.0) return 1.0;
  const double v = 2.0 * std::exp(1.0 - alpha * x_l - beta * o) / (gamma * h);
  return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
}

// Hop distance from s to t where only infrastructure vertices relay; -1 if
// unreachable.
inline int hop_distance(const netgap::TopologyGraph& g, const netgap::ModuleCatalog& catalog, VertexId s,
                        VertexId t) {
  std::map<VertexId, int> dist{{s, 0}};
  std::deque<VertexId> queue{s};
  while (!queue.empty()) {
    const VertexId u = queue.front();
    queue.pop_front();
    if (u == t) return dist[u];
    if (u != s && catalog.at(g.label(u)).kind == netgap::ModuleKind::processing) continue;
    for (const netgap::Edge& e : g.edges()) {
      if (e.src != u || dist.count(e.dst)) continue;
      dist[e.dst] = dist[u] + 1;
      queue.push_back(e.dst);
    }
  }
  return -1;
}

}  // namespace oracle
