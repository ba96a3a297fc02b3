#include "netgap/graph.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <json.hpp>

using nlohmann::json;

namespace netgap {

namespace {

void sorted_insert(std::vector<VertexId>& v, VertexId x) {
  v.insert(std::lower_bound(v.begin(), v.end(), x), x);
}

void sorted_erase(std::vector<VertexId>& v, VertexId x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it != v.end() && *it == x) v.erase(it);
}

bool sorted_contains(const std::vector<VertexId>& v, VertexId x) {
  return std::binary_search(v.begin(), v.end(), x);
}

}  // namespace

const TopologyGraph::Node& TopologyGraph::node(VertexId v) const {
  if (v >= nodes_.size() || !nodes_[v].alive) throw Error("unknown vertex " + std::to_string(v));
  return nodes_[v];
}

TopologyGraph::Node& TopologyGraph::node(VertexId v) {
  if (v >= nodes_.size() || !nodes_[v].alive) throw Error("unknown vertex " + std::to_string(v));
  return nodes_[v];
}

VertexId TopologyGraph::add_vertex(std::string label) {
  const VertexId id = next_id_;
  insert_vertex(id, std::move(label));
  return id;
}

void TopologyGraph::insert_vertex(VertexId id, std::string label) {
  if (id < nodes_.size() && nodes_[id].alive)
    throw Error("duplicate vertex id " + std::to_string(id));
  if (id >= nodes_.size()) nodes_.resize(static_cast<std::size_t>(id) + 1);
  nodes_[id].alive = true;
  Vertex vx{id, std::move(label)};
  auto it = std::lower_bound(vertices_.begin(), vertices_.end(), id,
                             [](const Vertex& a, VertexId b) { return a.id < b; });
  vertices_.insert(it, std::move(vx));
  next_id_ = std::max<VertexId>(next_id_, id + 1);
}

void TopologyGraph::remove_vertex(VertexId v) {
  Node& n = node(v);
  for (VertexId w : n.out) {
    sorted_erase(nodes_[w].in, v);
    edge_labels_.erase({v, w});
  }
  for (VertexId w : n.in) {
    sorted_erase(nodes_[w].out, v);
    edge_labels_.erase({w, v});
  }
  n = Node{};
  vertices_.erase(vertices_.begin() + static_cast<std::ptrdiff_t>(ordinal(v)));
}

void TopologyGraph::relabel(VertexId v, std::string label) {
  vertices_[ordinal(v)].label = std::move(label);
}

bool TopologyGraph::add_edge(VertexId src, VertexId dst, std::string label) {
  if (src == dst) throw Error("self-loop on vertex " + std::to_string(src));
  Node& s = node(src);
  Node& d = node(dst);
  if (sorted_contains(s.out, dst)) return false;
  sorted_insert(s.out, dst);
  sorted_insert(d.in, src);
  if (!label.empty()) edge_labels_[{src, dst}] = std::move(label);
  return true;
}

bool TopologyGraph::remove_edge(VertexId src, VertexId dst) {
  Node& s = node(src);
  if (!sorted_contains(s.out, dst)) return false;
  sorted_erase(s.out, dst);
  sorted_erase(node(dst).in, src);
  edge_labels_.erase({src, dst});
  return true;
}

bool TopologyGraph::has_vertex(VertexId v) const { return v < nodes_.size() && nodes_[v].alive; }

bool TopologyGraph::has_edge(VertexId src, VertexId dst) const {
  return has_vertex(src) && sorted_contains(nodes_[src].out, dst);
}

bool TopologyGraph::adjacent(VertexId a, VertexId b) const {
  return has_edge(a, b) || has_edge(b, a);
}

const std::string& TopologyGraph::label(VertexId v) const { return vertices_[ordinal(v)].label; }

std::vector<Edge> TopologyGraph::edges() const {
  std::vector<Edge> out;
  for (const Vertex& v : vertices_) {
    for (VertexId w : nodes_[v.id].out) {
      auto it = edge_labels_.find({v.id, w});
      out.push_back({v.id, w, it == edge_labels_.end() ? std::string{} : it->second});
    }
  }
  return out;
}

std::size_t TopologyGraph::edge_count() const {
  std::size_t n = 0;
  for (const Vertex& v : vertices_) n += nodes_[v.id].out.size();
  return n;
}

const std::vector<VertexId>& TopologyGraph::out_neighbors(VertexId v) const { return node(v).out; }
const std::vector<VertexId>& TopologyGraph::in_neighbors(VertexId v) const { return node(v).in; }

std::vector<VertexId> TopologyGraph::neighbors(VertexId v) const {
  const Node& n = node(v);
  std::vector<VertexId> out;
  out.reserve(n.out.size() + n.in.size());
  std::set_union(n.out.begin(), n.out.end(), n.in.begin(), n.in.end(), std::back_inserter(out));
  return out;
}

std::size_t TopologyGraph::degree(VertexId v) const {
  const Node& n = node(v);
  // Size of the union of two sorted lists.
  std::size_t i = 0, j = 0, count = 0;
  while (i < n.out.size() && j < n.in.size()) {
    if (n.out[i] < n.in[j]) {
      ++i;
    } else if (n.in[j] < n.out[i]) {
      ++j;
    } else {
      ++i;
      ++j;
    }
    ++count;
  }
  return count + (n.out.size() - i) + (n.in.size() - j);
}

std::size_t TopologyGraph::ordinal(VertexId v) const {
  auto it = std::lower_bound(vertices_.begin(), vertices_.end(), v,
                             [](const Vertex& a, VertexId b) { return a.id < b; });
  if (it == vertices_.end() || it->id != v) throw Error("unknown vertex " + std::to_string(v));
  return static_cast<std::size_t>(it - vertices_.begin());
}

bool TopologyGraph::operator==(const TopologyGraph& o) const {
  if (vertices_ != o.vertices_ || edge_labels_ != o.edge_labels_) return false;
  for (const Vertex& v : vertices_)
    if (nodes_[v.id].out != o.nodes_[v.id].out) return false;
  return true;
}

std::size_t physical_link_count(const TopologyGraph& g) {
  std::size_t n = 0;
  for (const Vertex& v : g.vertices()) {
    for (VertexId w : g.neighbors(v.id))
      if (v.id < w) ++n;
  }
  return n;
}

std::size_t segment_labels(const TopologyGraph& g, const ModuleCatalog& catalog,
                           std::vector<int>& segment_of) {
  const auto& vs = g.vertices();
  segment_of.assign(vs.size(), -1);
  std::vector<bool> gateway(vs.size(), false);
  for (std::size_t i = 0; i < vs.size(); ++i)
    gateway[i] = catalog.at(vs[i].label).kind == ModuleKind::gateway;
  int segments = 0;
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (gateway[i] || segment_of[i] != -1) continue;
    segment_of[i] = segments;
    stack.push_back(i);
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (VertexId w : g.neighbors(vs[u].id)) {
        const std::size_t k = g.ordinal(w);
        if (gateway[k] || segment_of[k] != -1) continue;
        segment_of[k] = segments;
        stack.push_back(k);
      }
    }
    ++segments;
  }
  return static_cast<std::size_t>(segments);
}

StructuralStats structural_stats(const TopologyGraph& g, const ModuleCatalog& catalog) {
  StructuralStats s;
  for (const Vertex& v : g.vertices()) {
    const ModuleSpec& spec = catalog.at(v.label);
    ++s.kind_counts[spec.kind];
    ++s.label_counts[v.label];
  }
  s.physical_links = physical_link_count(g);
  std::vector<int> seg;
  s.segments = segment_labels(g, catalog, seg);
  return s;
}

std::string dump_topology(const TopologyGraph& g) {
  json vertices = json::array();
  for (const Vertex& v : g.vertices()) vertices.push_back({{"id", v.id}, {"label", v.label}});
  json edges = json::array();
  for (const Edge& e : g.edges()) {
    json je = {{"src", e.src}, {"dst", e.dst}};
    if (!e.label.empty()) je["label"] = e.label;
    edges.push_back(std::move(je));
  }
  json doc = {{"vertices", vertices}, {"edges", edges}, {"next_id", g.next_id()}};
  return doc.dump(2) + "\n";
}

TopologyGraph parse_topology(const std::string& json_text) {
  try {
    json doc = json::parse(json_text);
    TopologyGraph g;
    for (const json& v : doc.at("vertices"))
      g.insert_vertex(v.at("id").get<VertexId>(), v.at("label").get<std::string>());
    for (const json& e : doc.value("edges", json::array())) {
      if (!g.add_edge(e.at("src").get<VertexId>(), e.at("dst").get<VertexId>(),
                      e.value("label", std::string{}))) {
        throw Error("duplicate edge in topology");
      }
    }
    // Keep id allocation monotone across save/load.
    if (auto it = doc.find("next_id"); it != doc.end()) g.advance_next_id(it->get<VertexId>());
    return g;
  } catch (const json::exception& e) {
    throw Error(std::string("topology: ") + e.what());
  }
}

TopologyGraph load_topology(const std::filesystem::path& path) {
  try {
    return parse_topology(read_text_file(path));
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::string to_dot(const TopologyGraph& g, const ModuleCatalog* catalog, const std::string& name) {
  std::ostringstream os;
  os << "digraph " << name << " {\n";
  for (const Vertex& v : g.vertices()) {
    std::string shape = "ellipse";
    if (catalog != nullptr) {
      if (const ModuleSpec* spec = catalog->find(v.label)) {
        switch (spec->kind) {
          case ModuleKind::processing: shape = "box"; break;
          case ModuleKind::switch_: shape = "circle"; break;
          case ModuleKind::gateway: shape = "diamond"; break;
        }
      }
    }
    os << "  n" << v.id << " [label=\"" << v.label << v.id << "\", shape=" << shape << "];\n";
  }
  for (const Edge& e : g.edges()) {
    const bool both = g.has_edge(e.dst, e.src);
    if (both && e.dst < e.src) continue;
    os << "  n" << e.src << " -> n" << e.dst;
    if (both) os << " [dir=both]";
    os << ";\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace netgap
