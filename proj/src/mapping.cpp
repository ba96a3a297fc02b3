#include "netgap/mapping.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace netgap {

Permutation ordered_crossover(const Permutation& a, const Permutation& b, std::size_t i, std::size_t k) {
  const std::size_t n = a.size();
  if (b.size() != n) throw Error("crossover parents differ in length");
  if (n == 0) return {};
  if (i > k || k >= n) throw Error("crossover cut points out of range");
  Permutation child(n);
  std::vector<bool> taken(n, false);
  for (std::size_t x = i; x <= k; ++x) {
    child[x] = a[x];
    taken[a[x]] = true;
  }
  std::size_t pos = (k + 1) % n;
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t v = b[(k + 1 + step) % n];
    if (taken[v]) continue;
    child[pos] = v;
    taken[v] = true;
    pos = (pos + 1) % n;
  }
  return child;
}

Permutation ordered_crossover(const Permutation& a, const Permutation& b, Rng& rng) {
  if (a.empty()) return {};
  std::size_t i = uniform_index(rng, a.size());
  std::size_t k = uniform_index(rng, a.size());
  if (i > k) std::swap(i, k);
  return ordered_crossover(a, b, i, k);
}

void scramble_mutation(Permutation& p, Rng& rng) {
  if (p.size() < 2) return;
  std::size_t i = uniform_index(rng, p.size());
  std::size_t k = uniform_index(rng, p.size());
  if (i > k) std::swap(i, k);
  if (i == k) {
    if (k + 1 < p.size()) ++k;
    else --i;
  }
  shuffle_range(p.begin() + static_cast<std::ptrdiff_t>(i), p.begin() + static_cast<std::ptrdiff_t>(k + 1), rng);
}

bool is_permutation_of_iota(const Permutation& p) {
  std::vector<bool> seen(p.size(), false);
  for (std::size_t v : p) {
    if (v >= p.size() || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

Permutation greedy_permutation(const TopologyGraph& g, const ModuleCatalog& catalog,
                               const AllocationSolution& alloc, const std::vector<VertexId>& processing) {
  const std::size_t r = processing.size();
  if (r != alloc.modules.size()) throw Error("greedy mapping needs one processing vertex per module");
  std::vector<int> segment_of;
  segment_labels(g, catalog, segment_of);

  // Vertex preference: own degree, then how connected its neighbors are.
  std::vector<std::pair<std::size_t, std::size_t>> key(r);
  for (std::size_t p = 0; p < r; ++p) {
    std::size_t around = 0;
    for (VertexId w : g.neighbors(processing[p])) around += g.degree(w);
    key[p] = {g.degree(processing[p]), around};
  }
  auto vertex_order = [&](std::vector<std::size_t>& ps) {
    std::stable_sort(ps.begin(), ps.end(), [&](std::size_t x, std::size_t y) { return key[x] > key[y]; });
  };
  std::vector<double> traffic(r, 0.0);
  for (std::size_t m = 0; m < r; ++m) traffic[m] = alloc.modules[m].out_mbps + alloc.modules[m].in_mbps;
  auto module_order = [&](std::vector<std::size_t>& ms) {
    std::stable_sort(ms.begin(), ms.end(), [&](std::size_t x, std::size_t y) { return traffic[x] > traffic[y]; });
  };

  std::map<int, std::vector<std::size_t>> by_segment;
  for (std::size_t p = 0; p < r; ++p) by_segment[segment_of[g.ordinal(processing[p])]].push_back(p);
  std::map<std::string, std::vector<std::size_t>> by_part;
  for (std::size_t m = 0; m < r; ++m) {
    const auto& parts = alloc.modules[m].parts;
    by_part[parts.empty() ? std::string{} : parts.front()].push_back(m);
  }
  std::vector<std::pair<std::string, std::vector<std::size_t>>> parts(by_part.begin(), by_part.end());
  std::stable_sort(parts.begin(), parts.end(),
                   [](const auto& x, const auto& y) { return x.second.size() > y.second.size(); });

  Permutation perm(r, r);
  std::vector<bool> vertex_used(r, false);
  std::vector<std::size_t> leftover_modules;
  for (auto& [part, mods] : parts) {
    // Smallest segment that still fits the whole part.
    int best = -1;
    std::size_t best_size = 0;
    for (const auto& [seg, ps] : by_segment) {
      const auto free = static_cast<std::size_t>(
          std::count_if(ps.begin(), ps.end(), [&](std::size_t p) { return !vertex_used[p]; }));
      if (free < mods.size() || free != ps.size()) continue;
      if (best == -1 || free < best_size) {
        best = seg;
        best_size = free;
      }
    }
    if (best == -1) {
      leftover_modules.insert(leftover_modules.end(), mods.begin(), mods.end());
      continue;
    }
    std::vector<std::size_t> ps = by_segment[best];
    vertex_order(ps);
    module_order(mods);
    for (std::size_t x = 0; x < mods.size(); ++x) {
      perm[ps[x]] = mods[x];
      vertex_used[ps[x]] = true;
    }
  }
  std::vector<std::size_t> free_vertices;
  for (std::size_t p = 0; p < r; ++p)
    if (!vertex_used[p]) free_vertices.push_back(p);
  vertex_order(free_vertices);
  module_order(leftover_modules);
  for (std::size_t x = 0; x < leftover_modules.size(); ++x) {
    perm[free_vertices[x]] = leftover_modules[x];
    vertex_used[free_vertices[x]] = true;
  }
  // Vertices still empty belong to segments that fitted a part only partly.
  std::vector<bool> module_used(r, false);
  for (std::size_t v : perm)
    if (v < r) module_used[v] = true;
  std::size_t next = 0;
  for (std::size_t p = 0; p < r; ++p) {
    if (perm[p] < r) continue;
    while (module_used[next]) ++next;
    perm[p] = next;
    module_used[next] = true;
  }
  return perm;
}

namespace {

struct Candidate {
  Permutation perm;
  double reward = 0.0;
};

}  // namespace

Sp3Result solve_sp3(Evaluator& ev, const TopologyGraph& g, const ModuleCatalog& catalog,
                    const AllocationSolution& alloc, const Sp3Config& cfg, std::uint64_t seed) {
  Sp3Result res;
  const auto& processing = ev.processing();
  const std::size_t r = processing.size();
  if (!ev.structure_ok() || r != alloc.modules.size()) {
    res.report = ev.structural_failure();
    return res;
  }
  res.searched = true;
  if (r == 0) {
    res.report = ev.evaluate(res.mapping);
    res.evaluations = 1;
    return res;
  }
  Rng rng(derive_seed(seed, 0x5033));
  std::map<Permutation, double> seen;
  auto score = [&](const Permutation& p) {
    auto it = seen.find(p);
    if (it != seen.end()) return it->second;
    const double reward = ev.evaluate(mapping_from_permutation(processing, p)).reward;
    ++res.evaluations;
    seen.emplace(p, reward);
    return reward;
  };

  const auto pop_size = static_cast<std::size_t>(cfg.population);
  std::vector<Candidate> pop;
  pop.push_back({greedy_permutation(g, catalog, alloc, processing), 0.0});
  Permutation base(r);
  std::iota(base.begin(), base.end(), std::size_t{0});
  while (pop.size() < pop_size) {
    Permutation p = base;
    shuffle_range(p.begin(), p.end(), rng);
    pop.push_back({std::move(p), 0.0});
  }
  Candidate best{pop.front().perm, -1.0};
  auto consider = [&](Candidate& c) {
    c.reward = score(c.perm);
    if (c.reward > best.reward) best = c;
  };
  for (Candidate& c : pop) consider(c);

  auto by_reward = [](const Candidate& a, const Candidate& b) { return a.reward > b.reward; };
  auto tournament = [&]() -> const Candidate& {
    const Candidate* pick = &pop[uniform_index(rng, pop.size())];
    for (int k = 1; k < cfg.tournament_size; ++k) {
      const Candidate& c = pop[uniform_index(rng, pop.size())];
      if (c.reward > pick->reward) pick = &c;
    }
    return *pick;
  };
  const auto elite = std::min<std::size_t>(static_cast<std::size_t>(cfg.elitism), pop_size);
  for (int gen = 0; gen < cfg.max_generations; ++gen) {
    std::stable_sort(pop.begin(), pop.end(), by_reward);
    std::vector<Candidate> next(pop.begin(), pop.begin() + static_cast<std::ptrdiff_t>(elite));
    while (next.size() < pop_size) {
      const Candidate& a = tournament();
      const Candidate& b = tournament();
      Candidate child{bernoulli(rng, cfg.crossover_rate) ? ordered_crossover(a.perm, b.perm, rng) : a.perm, 0.0};
      if (bernoulli(rng, cfg.mutation_rate)) scramble_mutation(child.perm, rng);
      consider(child);
      next.push_back(std::move(child));
    }
    pop = std::move(next);
  }
  res.mapping = mapping_from_permutation(processing, best.perm);
  res.report = ev.evaluate(res.mapping);
  return res;
}

Sp3Result solve_sp3(const TopologyGraph& topology, const AllocationSolution& allocation,
                    const ApplicationModel& model, const ModuleCatalog& catalog,
                    const RunConfig& config, std::uint64_t seed) {
  Evaluator ev(topology, model, catalog, allocation, config);
  return solve_sp3(ev, topology, catalog, allocation, config.sp3, seed);
}

}  // namespace netgap
