#include "netgap/report.hpp"

#include "support.hpp"

#include <doctest.h>

#include <filesystem>

using namespace netgap;

namespace {

ComparisonRow row(const std::string& run, std::size_t id, double reward) {
  ComparisonRow r;
  r.run = run;
  r.candidate = id;
  r.epoch = 10 * id;
  r.rollout_steps = 3;
  r.feasible = reward > 0;
  r.reward = reward;
  r.latency_score = 0.5;
  r.mean_hops = 3.25;
  r.mean_disjoint_paths = 2;
  r.max_link_load = 0.125;
  r.max_node_load = 0.75;
  r.cost = 317;
  r.processing = 22;
  r.switches = 8;
  r.gateways = 1;
  r.links = 70;
  r.segments = 2;
  r.wall_time_s = 1.5 + static_cast<double>(id);
  return r;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("number formatting") {
  CHECK(format_number(317.0) == "317");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.3333333333");
  CHECK(format_number(INFINITY) == "inf");
}

TEST_CASE("comparison table layout") {
  const std::string csv = write_comparison_csv({row("run_000", 0, 0.8)});
  CHECK(csv.rfind("run,candidate,epoch,rollout_steps,feasible,reward,", 0) == 0);
  CHECK(csv.find("wall_time_s") == std::string::npos);
  CHECK(csv.find("\r\n") != std::string::npos);
  CHECK(csv.find("run_000,0,0,3,1,0.8,0.5,3.25,2,0.125,0.75,317,22,8,1,70,2\r\n") != std::string::npos);
  CHECK(write_comparison_csv({row("r", 0, 0.8)}, true).find(",wall_time_s\r\n") != std::string::npos);
}

TEST_CASE("csv round trip with timing sidecar") {
  const std::vector<ComparisonRow> rows{row("a,\"b\"", 0, 0.8), row("a,\"b\"", 1, 0.0)};
  const std::string table = write_comparison_csv(rows);
  const std::string timing = write_timing_csv(rows);
  const auto back = read_comparison_csv(table, &timing);
  REQUIRE(back.size() == 2);
  CHECK(back[0].run == "a,\"b\"");
  CHECK(back[1].candidate == 1);
  CHECK_FALSE(back[1].feasible);
  CHECK(back[0].mean_hops == 3.25);
  CHECK(back[1].wall_time_s == std::optional<double>(2.5));
  CHECK_FALSE(read_comparison_csv(table)[0].wall_time_s.has_value());
  CHECK(write_comparison_csv(back) == table);
}

TEST_CASE("rfc 4180 parsing") {
  const auto t = parse_csv("a,\"x\"\"y\",\"line\nbreak\"\r\n1,,3\n");
  REQUIRE(t.size() == 2);
  CHECK(t[0] == std::vector<std::string>{"a", "x\"y", "line\nbreak"});
  CHECK(t[1] == std::vector<std::string>{"1", "", "3"});
  CHECK_THROWS_AS(parse_csv("\"open"), Error);
  CHECK_THROWS_AS(read_comparison_csv("run,candidate\r\nx,1\r\n"), Error);
}

TEST_CASE("loading a run directory") {
  const auto dir = std::filesystem::temp_directory_path() / "netgap_cli_unit";
  std::filesystem::create_directories(dir);
  const std::vector<ComparisonRow> rows{row("r", 0, 0.6), row("r", 1, 0.7)};
  write_text_file(dir / "comparison.csv", write_comparison_csv(rows));
  write_text_file(dir / "comparison_timing.csv", write_timing_csv(rows));
  const auto back = load_comparison(dir);
  REQUIRE(back.size() == 2);
  CHECK(back[1].wall_time_s == std::optional<double>(2.5));
  CHECK(load_comparison(dir / "comparison.csv").size() == 2);
  CHECK_THROWS_AS(load_comparison(dir / "missing.csv"), Error);
  std::filesystem::remove_all(dir);
}

}
