#include "netgap/mapping.hpp"

#include "fuzz.hpp"
#include "support.hpp"

#include <doctest.h>

#include <numeric>

using namespace netgap;

TEST_SUITE("mapping_sp3") {

TEST_CASE("ordered crossover worked example") {
  const Permutation a{0, 1, 2, 3, 4, 5, 6, 7};
  const Permutation b{3, 7, 5, 1, 6, 0, 2, 4};
  // keeps a[2..4] = 2 3 4, fills from b after position 4 with wrap-around: 0 7 5 1 6
  CHECK(ordered_crossover(a, b, 2, 4) == Permutation{1, 6, 2, 3, 4, 0, 7, 5});
  CHECK(ordered_crossover(a, b, 0, 7) == a);
  CHECK(ordered_crossover(a, a, 3, 5) == a);
}

TEST_CASE("operators keep permutations") {
  Rng rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + uniform_index(rng, 12);
    Permutation a(n), b(n);
    std::iota(a.begin(), a.end(), std::size_t{0});
    std::iota(b.begin(), b.end(), std::size_t{0});
    shuffle_range(a.begin(), a.end(), rng);
    shuffle_range(b.begin(), b.end(), rng);
    Permutation c = ordered_crossover(a, b, rng);
    CHECK(is_permutation_of_iota(c));
    scramble_mutation(c, rng);
    CHECK(is_permutation_of_iota(c));
  }
  CHECK_FALSE(is_permutation_of_iota({0, 0, 1}));
  CHECK_FALSE(is_permutation_of_iota({1, 2}));
}

TEST_CASE("single module needs a single evaluation") {
  ApplicationModel model({{"a", "X", 10, 1}}, {});
  AllocationProblem prob(model, table1_catalog(), 1, 1.0);
  const auto alloc = make_solution(prob, {{1}, {0}}, model);
  const auto g = testing::build_graph({"S", "M"}, {{0, 1}});
  RunConfig cfg;
  cfg.reward.required_segments = 1;
  const Sp3Result res = solve_sp3(g, alloc, model, table1_catalog(), cfg, 1);
  CHECK(res.searched);
  CHECK(res.evaluations == 1);
  CHECK(res.mapping.module_vertex == std::vector<VertexId>{1});
}

TEST_CASE("structural mismatch skips the search") {
  ApplicationModel model({{"a", "X", 10, 1}, {"b", "X", 10, 1}}, {});
  AllocationProblem prob(model, table1_catalog(), 2, 1.0);
  const auto alloc = make_solution(prob, {{1, 1}, {0, 1}}, model);
  const auto g = testing::build_graph({"S", "M"}, {{0, 1}});
  const Sp3Result res = solve_sp3(g, alloc, model, table1_catalog(), RunConfig{}, 1);
  CHECK_FALSE(res.searched);
  CHECK(res.evaluations == 0);
  CHECK(res.report.reward == 0.0);
  CHECK_FALSE(res.report.gates.module_count_ok);
}

TEST_CASE("greedy seed keeps each part inside one segment") {
  // segment A: S1 with M2, M3, M4; segment B: S5 with M6, M7; gateway 0
  const auto g = testing::build_graph({"G", "S", "M", "M", "M", "S", "M", "M"},
                                      {{0, 1}, {0, 5}, {1, 2}, {1, 3}, {1, 4}, {5, 6}, {5, 7}});
  ApplicationModel model({{"x0", "X", 10, 1}, {"x1", "X", 10, 1}, {"y0", "Y", 10, 1}, {"y1", "Y", 10, 1},
                          {"y2", "Y", 10, 1}},
                         {{"m", "x0", "x1", 1e4, 10}, {"n", "y0", "y2", 1e4, 10}});
  AllocationProblem prob(model, table1_catalog(), 5, 1.0);
  const auto alloc = make_solution(prob, {{1, 1, 1, 1, 1}, {0, 1, 2, 3, 4}}, model);
  const auto proc = processing_vertices(g, table1_catalog());
  const Permutation p = greedy_permutation(g, table1_catalog(), alloc, proc);
  REQUIRE(is_permutation_of_iota(p));
  const ModuleMapping m = mapping_from_permutation(proc, p);
  std::vector<int> seg;
  segment_labels(g, table1_catalog(), seg);
  CHECK(seg[g.ordinal(m.module_vertex[0])] == seg[g.ordinal(m.module_vertex[1])]);
  CHECK(seg[g.ordinal(m.module_vertex[2])] == seg[g.ordinal(m.module_vertex[3])]);
  CHECK(seg[g.ordinal(m.module_vertex[2])] == seg[g.ordinal(m.module_vertex[4])]);
  CHECK(seg[g.ordinal(m.module_vertex[0])] != seg[g.ordinal(m.module_vertex[2])]);
  RunConfig cfg;
  cfg.reward.required_disjoint_paths = 1;
  CHECK(evaluate(g, alloc, m, model, table1_catalog(), cfg).gates.segments_ok);
}

TEST_CASE("GA finds the exhaustive optimum on five-module instances") {
  const Grammar mesh = load_grammar(testing::data_path("grammars/mesh.gg"));
  const ModuleCatalog cat = table1_catalog();
  Rng rng(31);
  int hits = 0;
  for (int i = 0; i < 4; ++i) {
    const auto f = testing::sp3_instance(mesh, cat, rng);
    const double best = testing::exhaustive_sp3(f, cat);
    const Sp3Result res = solve_sp3(f.topology, f.allocation, f.model, cat, f.config, 100 + i);
    CHECK(res.report.reward <= best + 1e-12);
    hits += res.report.reward >= best - 1e-12;
  }
  CHECK(hits >= 3);
}

TEST_CASE("SP3 is seeded and never worse than its greedy start") {
  const Grammar mesh = load_grammar(testing::data_path("grammars/mesh.gg"));
  const ModuleCatalog cat = table1_catalog();
  Rng rng(8);
  const auto f = testing::sp3_instance(mesh, cat, rng);
  RunConfig cfg = f.config;
  cfg.sp3.max_generations = 3;
  const Sp3Result a = solve_sp3(f.topology, f.allocation, f.model, cat, cfg, 5);
  const Sp3Result b = solve_sp3(f.topology, f.allocation, f.model, cat, cfg, 5);
  CHECK(a.mapping == b.mapping);
  CHECK(a.report.reward == b.report.reward);
  const auto proc = processing_vertices(f.topology, cat);
  const ModuleMapping greedy =
      mapping_from_permutation(proc, greedy_permutation(f.topology, cat, f.allocation, proc));
  CHECK(a.report.reward >= evaluate(f.topology, f.allocation, greedy, f.model, cat, cfg).reward);
  CHECK(a.evaluations <= 120);
}

}
