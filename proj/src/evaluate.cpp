#include "netgap/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>
#include <set>

#include <json.hpp>

using nlohmann::json;

namespace netgap {

std::vector<VertexId> processing_vertices(const TopologyGraph& g, const ModuleCatalog& catalog) {
  std::vector<VertexId> out;
  for (const Vertex& v : g.vertices())
    if (catalog.at(v.label).kind == ModuleKind::processing) out.push_back(v.id);
  return out;
}

ModuleMapping mapping_from_permutation(const std::vector<VertexId>& processing,
                                       const std::vector<std::size_t>& permutation) {
  if (permutation.size() != processing.size())
    throw Error("permutation length does not match the processing vertex count");
  ModuleMapping m;
  m.module_vertex.assign(processing.size(), 0);
  std::vector<bool> seen(processing.size(), false);
  for (std::size_t p = 0; p < permutation.size(); ++p) {
    const std::size_t mod = permutation[p];
    if (mod >= processing.size() || seen[mod]) throw Error("not a permutation");
    seen[mod] = true;
    m.module_vertex[mod] = processing[p];
  }
  return m;
}

double latency_score(double x_l, int o, double h, double alpha, double beta, double gamma) {
  if (!(gamma > 0.0)) throw Error("latency score needs gamma > 0");
  if (h < 0.0) throw Error("negative hop count");
  if (h == 0.0) return 1.0;
  const double raw = 2.0 * std::exp(1.0 - alpha * x_l - beta * o) / (gamma * h);
  return std::clamp(raw, 0.0, 1.0);
}

// Disjoint paths ------------------------------------------------------------

namespace {

constexpr int kInf = 1 << 20;

class MaxFlow {
public:
  explicit MaxFlow(std::size_t n) : adj_(n) {}

  void add(std::size_t u, std::size_t v, int cap) {
    adj_[u].push_back(arcs_.size());
    arcs_.push_back({v, cap});
    adj_[v].push_back(arcs_.size());
    arcs_.push_back({u, 0});
  }

  int run(std::size_t s, std::size_t t, int limit) {
    int flow = 0;
    while (flow < limit) {
      std::vector<std::size_t> via(adj_.size(), kNone);
      std::vector<bool> seen(adj_.size(), false);
      std::deque<std::size_t> queue{s};
      seen[s] = true;
      while (!queue.empty() && !seen[t]) {
        const std::size_t u = queue.front();
        queue.pop_front();
        for (std::size_t a : adj_[u]) {
          const Arc& arc = arcs_[a];
          if (arc.cap <= 0 || seen[arc.to]) continue;
          seen[arc.to] = true;
          via[arc.to] = a;
          queue.push_back(arc.to);
        }
      }
      if (!seen[t]) break;
      int push = kInf;
      for (std::size_t v = t; v != s; v = arcs_[via[v] ^ 1].to) push = std::min(push, arcs_[via[v]].cap);
      for (std::size_t v = t; v != s; v = arcs_[via[v] ^ 1].to) {
        arcs_[via[v]].cap -= push;
        arcs_[via[v] ^ 1].cap += push;
      }
      flow += push;
    }
    return flow;
  }

private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  struct Arc {
    std::size_t to;
    int cap;
  };
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<Arc> arcs_;
};

}  // namespace

int disjoint_paths(const TopologyGraph& g, const ModuleCatalog& catalog, VertexId src, VertexId dst) {
  if (src == dst) throw Error("disjoint paths need two distinct vertices");
  const auto& vs = g.vertices();
  const std::size_t n = vs.size();
  std::vector<bool> infra(n);
  for (std::size_t i = 0; i < n; ++i) infra[i] = catalog.at(vs[i].label).kind != ModuleKind::processing;

  const std::size_t s = g.ordinal(src);
  const std::size_t t = g.ordinal(dst);
  std::vector<bool> exempt(n, false);
  const auto src_nb = g.neighbors(src);
  const auto dst_nb = g.neighbors(dst);
  for (VertexId w : src_nb) exempt[g.ordinal(w)] = true;
  for (VertexId w : dst_nb) {
    const std::size_t k = g.ordinal(w);
    if (exempt[k] && infra[k]) return kSwitchLocal;
    exempt[k] = true;
  }

  // Node i is split into in = 2i and out = 2i+1.
  MaxFlow flow(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == s || i == t) {
      flow.add(2 * i, 2 * i + 1, kInf);
    } else if (infra[i]) {
      flow.add(2 * i, 2 * i + 1, exempt[i] ? kInf : 1);
    }
  }
  for (const Edge& e : g.edges()) {
    const std::size_t a = g.ordinal(e.src);
    const std::size_t b = g.ordinal(e.dst);
    flow.add(2 * a + 1, 2 * b, infra[a] == infra[b] ? 1 : kInf);
  }
  return flow.run(2 * s + 1, 2 * t, static_cast<int>(n) + 1);
}

// Evaluator -----------------------------------------------------------------

struct Evaluator::Impl {
  const TopologyGraph& g;
  const ApplicationModel& model;
  const ModuleCatalog& catalog;
  const AllocationSolution& alloc;
  const RunConfig& config;

  std::vector<const ModuleSpec*> spec;  // per vertex ordinal
  std::vector<VertexId> processing;
  std::vector<int> segment_of;
  std::size_t segments = 0;
  std::size_t physical_links = 0;
  double cost = 0.0;
  std::size_t switches = 0, gateways = 0, port_overruns = 0;
  bool counts_ok = false;
  std::string counts_note;

  std::vector<std::pair<std::size_t, std::size_t>> module_pairs;  // unordered, s < d
  std::map<VertexId, std::vector<int>> dist_to;                   // per target vertex
  std::map<std::pair<VertexId, VertexId>, std::optional<std::vector<VertexId>>> paths;
  std::map<std::pair<VertexId, VertexId>, int> disjoint;

  Impl(const TopologyGraph& g_, const ApplicationModel& m, const ModuleCatalog& c,
       const AllocationSolution& a, const RunConfig& cfg)
      : g(g_), model(m), catalog(c), alloc(a), config(cfg) {
    std::map<std::string, std::size_t> counts;
    for (const Vertex& v : g.vertices()) {
      const ModuleSpec& sp = catalog.at(v.label);
      spec.push_back(&sp);
      cost += sp.cost;
      switch (sp.kind) {
        case ModuleKind::processing:
          processing.push_back(v.id);
          ++counts[sp.type_name];
          break;
        case ModuleKind::switch_: ++switches; break;
        case ModuleKind::gateway: ++gateways; break;
      }
      if (g.degree(v.id) > static_cast<std::size_t>(sp.max_ports)) ++port_overruns;
    }
    physical_links = physical_link_count(g);
    cost += catalog.link_cost() * static_cast<double>(physical_links);
    segments = segment_labels(g, catalog, segment_of);
    const auto wanted = alloc.type_counts();
    counts_ok = counts == wanted;
    if (!counts_ok) {
      std::size_t have = processing.size(), want = alloc.modules.size();
      counts_note = "topology has " + std::to_string(have) + " processing vertices, allocation needs " +
                    std::to_string(want);
      if (have == want) counts_note = "processing vertex types do not match the allocation";
    }
    std::set<std::pair<std::size_t, std::size_t>> pairs;
    for (const auto& [key, t] : alloc.traffic)
      pairs.insert({std::min(key.first, key.second), std::max(key.first, key.second)});
    module_pairs.assign(pairs.begin(), pairs.end());
  }

  bool is_processing(std::size_t ord) const { return spec[ord]->kind == ModuleKind::processing; }

  // Hop distance to `t`; processing vertices other than `t` are never expanded.
  const std::vector<int>& distances(VertexId t) {
    auto it = dist_to.find(t);
    if (it != dist_to.end()) return it->second;
    std::vector<int> dist(g.vertex_count(), -1);
    std::deque<VertexId> queue{t};
    dist[g.ordinal(t)] = 0;
    while (!queue.empty()) {
      const VertexId u = queue.front();
      queue.pop_front();
      const std::size_t uo = g.ordinal(u);
      if (u != t && is_processing(uo)) continue;
      for (VertexId w : g.in_neighbors(u)) {
        const std::size_t wo = g.ordinal(w);
        if (dist[wo] != -1) continue;
        dist[wo] = dist[uo] + 1;
        queue.push_back(w);
      }
    }
    return dist_to.emplace(t, std::move(dist)).first->second;
  }

  // Hop-shortest route, lexicographically smallest vertex sequence.
  const std::optional<std::vector<VertexId>>& path(VertexId s, VertexId t) {
    auto it = paths.find({s, t});
    if (it != paths.end()) return it->second;
    const auto& dist = distances(t);
    std::optional<std::vector<VertexId>> out;
    if (dist[g.ordinal(s)] > 0) {
      std::vector<VertexId> p{s};
      VertexId u = s;
      while (u != t) {
        const int want = dist[g.ordinal(u)] - 1;
        for (VertexId w : g.out_neighbors(u)) {
          const std::size_t wo = g.ordinal(w);
          if (dist[wo] == want && (w == t || !is_processing(wo))) {
            u = w;
            break;
          }
        }
        p.push_back(u);
      }
      out = std::move(p);
    }
    return paths.emplace(std::make_pair(s, t), std::move(out)).first->second;
  }

  int disjoint_count(VertexId a, VertexId b) {
    const auto key = std::make_pair(std::min(a, b), std::max(a, b));
    auto it = disjoint.find(key);
    if (it != disjoint.end()) return it->second;
    const int n = disjoint_paths(g, catalog, key.first, key.second);
    disjoint.emplace(key, n);
    return n;
  }

  bool mapping_ok(const ModuleMapping& m, std::string* why) const {
    if (m.module_vertex.size() != alloc.modules.size()) {
      if (why) *why = "mapping covers " + std::to_string(m.module_vertex.size()) + " of " +
                      std::to_string(alloc.modules.size()) + " modules";
      return false;
    }
    std::set<VertexId> used;
    for (std::size_t k = 0; k < m.module_vertex.size(); ++k) {
      const VertexId v = m.module_vertex[k];
      if (!g.has_vertex(v) || !is_processing(g.ordinal(v))) {
        if (why) *why = "module " + std::to_string(k) + " mapped to a non-processing vertex";
        return false;
      }
      if (!used.insert(v).second) {
        if (why) *why = "vertex " + std::to_string(v) + " hosts two modules";
        return false;
      }
      if (g.label(v) != alloc.modules[k].spec.type_name) {
        if (why) *why = "module " + std::to_string(k) + " has type " + alloc.modules[k].spec.type_name +
                        " but vertex " + std::to_string(v) + " is " + g.label(v);
        return false;
      }
    }
    return true;
  }

  Routing route(const ModuleMapping& m, bool per_message) {
    Routing r;
    std::map<std::pair<VertexId, VertexId>, double> mbps;
    for (const Edge& e : g.edges()) mbps[{e.src, e.dst}] = 0.0;
    auto add_path = [&](const std::vector<VertexId>& p, double bw) {
      for (std::size_t k = 0; k + 1 < p.size(); ++k) mbps[{p[k], p[k + 1]}] += bw;
    };
    if (per_message) {
      r.message_path.resize(model.messages().size());
      for (std::size_t i = 0; i < model.messages().size(); ++i) {
        const Message& msg = model.messages()[i];
        const std::size_t a = alloc.process_module[msg.src_index];
        const std::size_t b = alloc.process_module[msg.dst_index];
        if (a == b) continue;
        ++r.inter_module_messages;
        const auto& p = path(m.module_vertex[a], m.module_vertex[b]);
        if (!p) {
          ++r.unreachable;
          continue;
        }
        r.message_path[i] = *p;
        r.total_edge_hops += static_cast<double>(p->size() - 1);
        add_path(*p, msg.bandwidth_mbps);
      }
    } else {
      for (const auto& [key, t] : alloc.traffic) {
        r.inter_module_messages += t.messages;
        const auto& p = path(m.module_vertex[key.first], m.module_vertex[key.second]);
        if (!p) {
          r.unreachable += t.messages;
          continue;
        }
        r.total_edge_hops += static_cast<double>(t.messages * (p->size() - 1));
        add_path(*p, t.mbps);
      }
    }
    for (const auto& [e, bw] : mbps) {
      const double cap = std::min(spec[g.ordinal(e.first)]->link_mbps, spec[g.ordinal(e.second)]->link_mbps);
      double load = 0.0;
      if (bw > 0.0) load = cap > 0.0 ? bw / cap : std::numeric_limits<double>::infinity();
      r.links.push_back({e.first, e.second, bw, load});
    }
    for (std::size_t k = 0; k < alloc.modules.size(); ++k) {
      const VertexId v = m.module_vertex[k];
      r.nodes.push_back({v, alloc.modules[k].slot,
                         alloc.modules[k].compute_load / spec[g.ordinal(v)]->compute_mops});
    }
    return r;
  }

  // Fills gate flags; `routing` must come from the same mapping.
  Gates gates(const ModuleMapping& m, std::vector<std::string>& notes, double* mean_dp, int* min_dp) {
    Gates gt;
    std::string why;
    gt.module_count_ok = counts_ok && mapping_ok(m, &why);
    if (!counts_ok) notes.push_back(counts_note);
    else if (!gt.module_count_ok) notes.push_back(why);
    if (!gt.module_count_ok) return gt;

    const int required = config.reward.required_disjoint_paths;
    gt.disjoint_paths_ok = true;
    double sum = 0.0;
    std::size_t bounded = 0;
    int lowest = kSwitchLocal;
    for (auto [a, b] : module_pairs) {
      const int n = disjoint_count(m.module_vertex[a], m.module_vertex[b]);
      lowest = std::min(lowest, n);
      if (n == kSwitchLocal) continue;
      sum += n;
      ++bounded;
      if (n < required && gt.disjoint_paths_ok) {
        gt.disjoint_paths_ok = false;
        notes.push_back("modules " + std::to_string(a) + " and " + std::to_string(b) + " have " +
                        std::to_string(n) + " disjoint paths");
      }
    }
    if (mean_dp) *mean_dp = bounded ? sum / static_cast<double>(bounded) : required;
    if (min_dp) *min_dp = lowest;

    gt.segments_ok = true;
    if (segments != static_cast<std::size_t>(config.reward.required_segments)) {
      gt.segments_ok = false;
      notes.push_back(std::to_string(segments) + " segments, " +
                      std::to_string(config.reward.required_segments) + " required");
    }
    std::map<std::string, std::set<int>> part_segments;
    for (std::size_t k = 0; k < alloc.modules.size(); ++k) {
      const int seg = segment_of[g.ordinal(m.module_vertex[k])];
      for (const std::string& part : alloc.modules[k].parts) part_segments[part].insert(seg);
    }
    std::map<int, std::string> owner;
    for (const auto& [part, segs] : part_segments) {
      if (segs.size() != 1) {
        gt.segments_ok = false;
        notes.push_back("part " + part + " spans " + std::to_string(segs.size()) + " segments");
        continue;
      }
      auto [it, fresh] = owner.emplace(*segs.begin(), part);
      if (!fresh) {
        gt.segments_ok = false;
        notes.push_back("parts " + it->second + " and " + part + " share a segment");
      }
    }
    for (const Message& msg : model.messages()) {
      if (model.processes()[msg.src_index].part == model.processes()[msg.dst_index].part) continue;
      const std::size_t a = alloc.process_module[msg.src_index];
      const std::size_t b = alloc.process_module[msg.dst_index];
      bool via_gateway = false;
      if (a != b) {
        if (const auto& p = path(m.module_vertex[a], m.module_vertex[b])) {
          for (VertexId v : *p)
            via_gateway = via_gateway || spec[g.ordinal(v)]->kind == ModuleKind::gateway;
        }
      }
      if (!via_gateway) {
        gt.segments_ok = false;
        notes.push_back("message " + msg.id + " crosses parts without a gateway");
        break;
      }
    }
    return gt;
  }

  void fill_structure(EvaluationReport& rep) const {
    rep.cost = cost;
    rep.cost_score = cost > 0.0 ? std::clamp(alloc.cost() / cost, 0.0, 1.0) : 1.0;
    rep.segments = segments;
    rep.physical_links = physical_links;
    rep.processing_vertices = processing.size();
    rep.switch_vertices = switches;
    rep.gateway_vertices = gateways;
    rep.port_overruns = port_overruns;
  }

  EvaluationReport evaluate(const ModuleMapping& m) {
    EvaluationReport rep;
    fill_structure(rep);
    double mean_dp = 0.0;
    int min_dp = 0;
    rep.gates = gates(m, rep.notes, &mean_dp, &min_dp);
    if (!rep.gates.module_count_ok) return rep;
    rep.mean_disjoint_paths = mean_dp;
    rep.min_disjoint_paths = min_dp;
    const double required = config.reward.required_disjoint_paths;
    rep.dp_score = std::clamp(mean_dp / required, 0.0, 1.0);

    const Routing r = route(m, false);
    rep.routing_ok = r.unreachable == 0;
    if (!rep.routing_ok)
      rep.notes.push_back(std::to_string(r.unreachable) + " messages have no route");
    rep.inter_module_messages = r.inter_module_messages;
    const std::size_t routed = r.inter_module_messages - r.unreachable;
    rep.h = routed ? r.total_edge_hops / static_cast<double>(routed) : 0.0;
    for (const LinkLoad& l : r.links) {
      rep.x_l = std::max(rep.x_l, l.load);
      if (l.load > config.reward.overload_threshold) ++rep.o;
    }
    for (const NodeLoad& n : r.nodes) rep.max_node_load = std::max(rep.max_node_load, n.load);
    const RewardConfig& w = config.reward;
    rep.latency_score = latency_score(rep.x_l, rep.o, rep.h, w.alpha, w.beta, w.gamma);
    rep.link_loads = r.links;
    rep.node_loads = r.nodes;
    if (rep.gates.all() && rep.routing_ok) {
      rep.reward = (w.w_latency * rep.latency_score + w.w_cost * rep.cost_score +
                    w.w_resilience * rep.dp_score) /
                   (w.w_latency + w.w_cost + w.w_resilience);
    }
    return rep;
  }
};

Evaluator::Evaluator(const TopologyGraph& topology, const ApplicationModel& model,
                     const ModuleCatalog& catalog, const AllocationSolution& allocation,
                     const RunConfig& config)
    : impl_(std::make_unique<Impl>(topology, model, catalog, allocation, config)) {}

Evaluator::~Evaluator() = default;

const std::vector<VertexId>& Evaluator::processing() const { return impl_->processing; }

bool Evaluator::structure_ok() const {
  return impl_->counts_ok &&
         impl_->segments == static_cast<std::size_t>(impl_->config.reward.required_segments);
}

Routing Evaluator::route_and_load(const ModuleMapping& mapping) {
  std::string why;
  if (!impl_->mapping_ok(mapping, &why)) throw Error("invalid mapping: " + why);
  return impl_->route(mapping, true);
}

Gates Evaluator::check_gates(const ModuleMapping& mapping) {
  std::vector<std::string> notes;
  return impl_->gates(mapping, notes, nullptr, nullptr);
}

EvaluationReport Evaluator::evaluate(const ModuleMapping& mapping) { return impl_->evaluate(mapping); }

EvaluationReport Evaluator::structural_failure() const {
  EvaluationReport rep;
  impl_->fill_structure(rep);
  if (!impl_->counts_ok) rep.notes.push_back(impl_->counts_note);
  rep.gates.module_count_ok = impl_->counts_ok;
  const auto required = static_cast<std::size_t>(impl_->config.reward.required_segments);
  if (impl_->segments != required) {
    rep.notes.push_back(std::to_string(impl_->segments) + " segments, " + std::to_string(required) +
                        " required");
  }
  return rep;
}

Routing route_and_load(const TopologyGraph& topology, const AllocationSolution& allocation,
                       const ModuleMapping& mapping, const ApplicationModel& model,
                       const ModuleCatalog& catalog) {
  const RunConfig config;
  Evaluator ev(topology, model, catalog, allocation, config);
  return ev.route_and_load(mapping);
}

Gates check_gates(const TopologyGraph& topology, const AllocationSolution& allocation,
                  const ModuleMapping& mapping, const ApplicationModel& model,
                  const ModuleCatalog& catalog, const RunConfig& config) {
  Evaluator ev(topology, model, catalog, allocation, config);
  return ev.check_gates(mapping);
}

EvaluationReport evaluate(const TopologyGraph& topology, const AllocationSolution& allocation,
                          const ModuleMapping& mapping, const ApplicationModel& model,
                          const ModuleCatalog& catalog, const RunConfig& config) {
  Evaluator ev(topology, model, catalog, allocation, config);
  return ev.evaluate(mapping);
}

// Serialization -------------------------------------------------------------

namespace {

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

std::string dump_report(const EvaluationReport& r, const ModuleMapping* mapping) {
  json links = json::array();
  for (const LinkLoad& l : r.link_loads) {
    links.push_back({{"src", l.src}, {"dst", l.dst}, {"mbps", l.mbps}, {"load", finite_or_null(l.load)}});
  }
  json nodes = json::array();
  for (const NodeLoad& n : r.node_loads)
    nodes.push_back({{"vertex", n.vertex}, {"slot", n.slot}, {"load", n.load}});
  json doc = {
      {"gates",
       {{"module_count_ok", r.gates.module_count_ok},
        {"disjoint_paths_ok", r.gates.disjoint_paths_ok},
        {"segments_ok", r.gates.segments_ok}}},
      {"routing_ok", r.routing_ok},
      {"reward", r.reward},
      {"latency_score", r.latency_score},
      {"max_link_load", finite_or_null(r.x_l)},
      {"overloaded_links", r.o},
      {"mean_hops", r.h},
      {"cost", r.cost},
      {"cost_score", r.cost_score},
      {"mean_disjoint_paths", r.mean_disjoint_paths},
      {"min_disjoint_paths", r.min_disjoint_paths == kSwitchLocal ? json("switch-local")
                                                                  : json(r.min_disjoint_paths)},
      {"dp_score", r.dp_score},
      {"max_node_load", r.max_node_load},
      {"segments", r.segments},
      {"physical_links", r.physical_links},
      {"processing_vertices", r.processing_vertices},
      {"switch_vertices", r.switch_vertices},
      {"gateway_vertices", r.gateway_vertices},
      {"port_overruns", r.port_overruns},
      {"inter_module_messages", r.inter_module_messages},
      {"notes", r.notes},
      {"link_loads", links},
      {"node_loads", nodes},
  };
  if (mapping) doc["mapping"] = mapping->module_vertex;
  return doc.dump(2) + "\n";
}

std::string dump_mapping(const ModuleMapping& mapping, const AllocationSolution& allocation) {
  json entries = json::array();
  for (std::size_t k = 0; k < mapping.module_vertex.size(); ++k) {
    entries.push_back({{"slot", allocation.modules.at(k).slot}, {"vertex", mapping.module_vertex[k]}});
  }
  return json({{"mapping", entries}}).dump(2) + "\n";
}

ModuleMapping parse_mapping(const std::string& json_text, const AllocationSolution& allocation) {
  try {
    const json doc = json::parse(json_text);
    std::map<int, VertexId> by_slot;
    for (const json& e : doc.at("mapping")) by_slot[e.at("slot").get<int>()] = e.at("vertex").get<VertexId>();
    ModuleMapping m;
    for (const IncludedModule& mod : allocation.modules) {
      auto it = by_slot.find(mod.slot);
      if (it == by_slot.end()) throw Error("mapping does not place slot " + std::to_string(mod.slot));
      m.module_vertex.push_back(it->second);
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(std::string("mapping: ") + e.what());
  }
}

}  // namespace netgap
