#pragma once

#include "netgap/graph.hpp"
#include "netgap/model.hpp"
#include "netgap/rng.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace testing {

inline std::filesystem::path data_path(const std::string& rel) {
  return std::filesystem::path(NETGAP_DATA_DIR) / rel;
}

inline double uniform(netgap::Rng& rng, double lo, double hi) { return lo + (hi - lo) * netgap::uniform01(rng); }

// Vertices get ids 0..n-1 in order; each pair becomes a link in both directions.
inline netgap::TopologyGraph build_graph(const std::vector<std::string>& labels,
                                         const std::vector<std::pair<int, int>>& links) {
  netgap::TopologyGraph g;
  for (const auto& l : labels) g.add_vertex(l);
  for (auto [a, b] : links) {
    g.add_edge(static_cast<netgap::VertexId>(a), static_cast<netgap::VertexId>(b));
    g.add_edge(static_cast<netgap::VertexId>(b), static_cast<netgap::VertexId>(a));
  }
  return g;
}

struct ModelShape {
  std::size_t processes = 6;
  std::size_t messages = 8;
  std::size_t parts = 1;
  double demand_lo = 0.2, demand_hi = 1.5;
  double mbps_lo = 0.5, mbps_hi = 30.0;
};

// Messages stay inside their part unless `cross` is set.
inline netgap::ApplicationModel random_model(netgap::Rng& rng, const ModelShape& s, bool cross = false) {
  std::vector<netgap::Process> procs;
  for (std::size_t i = 0; i < s.processes; ++i) {
    netgap::Process p;
    p.id = "p" + std::to_string(i);
    p.part = "P" + std::to_string(i % s.parts);
    p.period_ms = 10.0;
    p.compute_mops = uniform(rng, s.demand_lo, s.demand_hi);
    procs.push_back(p);
  }
  std::vector<netgap::Message> msgs;
  for (std::size_t k = 0; k < s.messages; ++k) {
    std::size_t a, b;
    do {
      a = netgap::uniform_index(rng, s.processes);
      b = netgap::uniform_index(rng, s.processes);
    } while (a == b || (!cross && a % s.parts != b % s.parts));
    netgap::Message m;
    m.id = "m" + std::to_string(k);
    m.src = procs[a].id;
    m.dst = procs[b].id;
    m.period_ms = 10.0;
    m.size_bits = uniform(rng, s.mbps_lo, s.mbps_hi) * 10.0 * 1000.0;
    msgs.push_back(m);
  }
  return netgap::ApplicationModel(std::move(procs), std::move(msgs));
}

// Small allocation instance: up to 8 processes in one or two parts, with
// enough traffic that interface capacity matters.
inline netgap::ApplicationModel small_allocation_model(netgap::Rng& rng) {
  ModelShape s;
  s.processes = 4 + netgap::uniform_index(rng, 5);
  s.parts = 1 + netgap::uniform_index(rng, 2);
  s.messages = s.processes + netgap::uniform_index(rng, s.processes);
  s.demand_lo = 0.3;
  s.demand_hi = 1.4;
  s.mbps_lo = 5.0;
  s.mbps_hi = 45.0;
  return random_model(rng, s);
}

}  // namespace testing
