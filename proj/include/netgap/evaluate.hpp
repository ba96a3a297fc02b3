#pragma once

#include "netgap/allocation.hpp"
#include "netgap/config.hpp"
#include "netgap/graph.hpp"
#include "netgap/model.hpp"

#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace netgap {

/// Which processing vertex hosts each included module (module ordinal -> vertex).
struct ModuleMapping {
  std::vector<VertexId> module_vertex;

  bool operator==(const ModuleMapping&) const = default;
};

/// Processing-kind vertices of `g` in id order.
std::vector<VertexId> processing_vertices(const TopologyGraph& g, const ModuleCatalog& catalog);

/// Builds a mapping from a permutation: position = processing-vertex ordinal,
/// value = module ordinal.
ModuleMapping mapping_from_permutation(const std::vector<VertexId>& processing,
                                       const std::vector<std::size_t>& permutation);

/// l_s = clamp(2 e^(1 - alpha x_l - beta o) / (gamma h), 0, 1). Throws on
/// gamma <= 0 or a negative hop count; h == 0 means no inter-module traffic
/// and yields 1.
double latency_score(double x_l, int o, double h, double alpha, double beta, double gamma);

/// Returned by disjoint_paths when the two endpoints hang off a common
/// infrastructure vertex, so no switch other than the shared first/last one
/// can fail between them.
inline constexpr int kSwitchLocal = std::numeric_limits<int>::max();

/// Maximum number of src->dst paths that share no intermediate
/// infrastructure vertex and no infrastructure-to-infrastructure link.
/// Vertices adjacent to src or dst are exempt from the vertex constraint;
/// processing vertices never act as intermediates.
int disjoint_paths(const TopologyGraph& g, const ModuleCatalog& catalog, VertexId src, VertexId dst);

struct LinkLoad {
  VertexId src = 0;
  VertexId dst = 0;
  double mbps = 0.0;
  double load = 0.0;  // fraction of the link capacity
};

struct NodeLoad {
  VertexId vertex = 0;
  int slot = 0;
  double load = 0.0;  // compute load / capacity
};

/// Per-message routes plus the loads they induce.
struct Routing {
  std::vector<std::vector<VertexId>> message_path;  // empty for intra-module messages
  std::vector<LinkLoad> links;                      // every directed edge, sorted
  std::vector<NodeLoad> nodes;                      // per module ordinal
  std::size_t unreachable = 0;                      // inter-module messages without a route
  std::size_t inter_module_messages = 0;
  double total_edge_hops = 0.0;
};

struct Gates {
  bool module_count_ok = false;
  bool disjoint_paths_ok = false;
  bool segments_ok = false;

  bool all() const { return module_count_ok && disjoint_paths_ok && segments_ok; }
};

struct EvaluationReport {
  Gates gates;
  bool routing_ok = false;
  double x_l = 0.0;
  int o = 0;
  double h = 0.0;
  double latency_score = 0.0;
  double cost = 0.0;
  double cost_score = 0.0;
  double mean_disjoint_paths = 0.0;
  int min_disjoint_paths = 0;  // kSwitchLocal when every pair is switch-local
  double dp_score = 0.0;
  double reward = 0.0;
  double max_node_load = 0.0;
  std::size_t segments = 0;
  std::size_t physical_links = 0;
  std::size_t processing_vertices = 0;
  std::size_t switch_vertices = 0;
  std::size_t gateway_vertices = 0;
  std::size_t port_overruns = 0;  // vertices with more neighbors than ports
  std::size_t inter_module_messages = 0;
  std::vector<std::string> notes;  // why gates failed
  std::vector<LinkLoad> link_loads;
  std::vector<NodeLoad> node_loads;
};

/// Evaluates many mappings against one topology. Mapping-independent data
/// (segments, cost, routes between processing vertices, disjoint-path counts)
/// is computed once and cached. Not thread-safe; use one per thread.
class Evaluator {
public:
  Evaluator(const TopologyGraph& topology, const ApplicationModel& model,
            const ModuleCatalog& catalog, const AllocationSolution& allocation,
            const RunConfig& config);
  ~Evaluator();
  Evaluator(const Evaluator&) = delete;
  Evaluator& operator=(const Evaluator&) = delete;

  const std::vector<VertexId>& processing() const;
  /// Gates that no mapping can fix: processing counts per type and the
  /// segment count.
  bool structure_ok() const;

  Routing route_and_load(const ModuleMapping& mapping);
  Gates check_gates(const ModuleMapping& mapping);
  EvaluationReport evaluate(const ModuleMapping& mapping);
  /// Report for a topology that cannot host the allocation at all.
  EvaluationReport structural_failure() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// One-shot wrappers.
Routing route_and_load(const TopologyGraph& topology, const AllocationSolution& allocation,
                       const ModuleMapping& mapping, const ApplicationModel& model,
                       const ModuleCatalog& catalog);
Gates check_gates(const TopologyGraph& topology, const AllocationSolution& allocation,
                  const ModuleMapping& mapping, const ApplicationModel& model,
                  const ModuleCatalog& catalog, const RunConfig& config);
EvaluationReport evaluate(const TopologyGraph& topology, const AllocationSolution& allocation,
                          const ModuleMapping& mapping, const ApplicationModel& model,
                          const ModuleCatalog& catalog, const RunConfig& config);

std::string dump_report(const EvaluationReport& report, const ModuleMapping* mapping = nullptr);

std::string dump_mapping(const ModuleMapping& mapping, const AllocationSolution& allocation);
ModuleMapping parse_mapping(const std::string& json_text, const AllocationSolution& allocation);

}  // namespace netgap
