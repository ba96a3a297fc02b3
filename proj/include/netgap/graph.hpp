#pragma once

#include "netgap/model.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace netgap {

using VertexId = std::uint32_t;

struct Vertex {
  VertexId id = 0;
  std::string label;

  bool operator==(const Vertex&) const = default;
};

struct Edge {
  VertexId src = 0;
  VertexId dst = 0;
  std::string label;  // unused by the evaluator

  bool operator==(const Edge&) const = default;
};

/// Directed labeled graph of hardware modules (vertices) and links (edges).
///
/// Vertex ids are assigned monotonically and never reused. There are no
/// self-loops and at most one edge per ordered vertex pair. Vertices are kept
/// sorted by id, and each adjacency list is kept sorted, so iteration order is
/// deterministic.
class TopologyGraph {
public:
  TopologyGraph() = default;

  VertexId add_vertex(std::string label);
  /// Inserts a vertex with an explicit id (used by deserialization).
  void insert_vertex(VertexId id, std::string label);
  void remove_vertex(VertexId v);
  /// Ensures future ids start at `next` or later.
  void advance_next_id(VertexId next) { next_id_ = std::max(next_id_, next); }
  void relabel(VertexId v, std::string label);

  /// Returns false if the edge already exists. Throws on self-loop or
  /// unknown endpoint.
  bool add_edge(VertexId src, VertexId dst, std::string label = {});
  bool remove_edge(VertexId src, VertexId dst);

  bool has_vertex(VertexId v) const;
  bool has_edge(VertexId src, VertexId dst) const;
  /// True if an edge exists in either direction.
  bool adjacent(VertexId a, VertexId b) const;

  const std::string& label(VertexId v) const;
  const std::vector<Vertex>& vertices() const { return vertices_; }
  std::vector<Edge> edges() const;
  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const;
  VertexId next_id() const { return next_id_; }

  const std::vector<VertexId>& out_neighbors(VertexId v) const;
  const std::vector<VertexId>& in_neighbors(VertexId v) const;
  /// Distinct adjacent vertices in either direction, sorted.
  std::vector<VertexId> neighbors(VertexId v) const;
  /// Number of distinct adjacent vertices (a <-> pair counts once).
  std::size_t degree(VertexId v) const;

  /// Position of `v` in vertices(), for dense per-vertex arrays.
  std::size_t ordinal(VertexId v) const;

  bool operator==(const TopologyGraph& o) const;

private:
  struct Node {
    bool alive = false;
    std::vector<VertexId> out;
    std::vector<VertexId> in;
  };
  std::vector<Vertex> vertices_;  // sorted by id
  std::vector<Node> nodes_;       // indexed by id
  std::map<std::pair<VertexId, VertexId>, std::string> edge_labels_;  // non-empty only
  VertexId next_id_ = 0;

  const Node& node(VertexId v) const;
  Node& node(VertexId v);
};

struct StructuralStats {
  std::map<ModuleKind, std::size_t> kind_counts;
  std::map<std::string, std::size_t> label_counts;
  std::size_t physical_links = 0;
  std::size_t segments = 0;
};

/// Counts per kind and label, physical links (unordered adjacent pairs) and
/// segments (connected components once gateway vertices are removed).
/// Throws Error if a label is not in the catalog.
StructuralStats structural_stats(const TopologyGraph& g, const ModuleCatalog& catalog);

/// Segment id per vertex ordinal; gateways get -1. Returns the segment count.
std::size_t segment_labels(const TopologyGraph& g, const ModuleCatalog& catalog,
                           std::vector<int>& segment_of);

std::size_t physical_link_count(const TopologyGraph& g);

std::string dump_topology(const TopologyGraph& g);
TopologyGraph parse_topology(const std::string& json_text);
TopologyGraph load_topology(const std::filesystem::path& path);

/// Graphviz rendering; ↔ pairs are drawn as one undirected-looking edge.
std::string to_dot(const TopologyGraph& g, const ModuleCatalog* catalog = nullptr,
                   const std::string& name = "topology");

}  // namespace netgap
