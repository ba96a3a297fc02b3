#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace netgap {

struct Sp1Config {
  int max_generations = 200;
  int population = 400;
  int candidate_module_slots = 30;
  // Shrink compute and bandwidth capacities by the overload threshold so the
  // allocation already respects the utilization requirement.
  bool tighten_by_threshold = true;
  // Run one GA per application part instead of one joint run.
  bool per_part = false;
  double crossover_rate = 0.9;
  int tournament_size = 3;
  int elitism = 2;
};

struct Sp2Config {
  int max_epochs = 10000;
  int parallel_rollouts = 1;
  double uct_c = 2.8;
  int rollout_depth_cap = 0;  // 0 = derive from the required module count
  int max_untried = 256;
  int log_every = 100;        // epochs between progress events
};

struct Sp3Config {
  int max_generations = 3;
  int population = 50;
  int tournament_size = 3;
  int elitism = 1;
  double crossover_rate = 0.9;
  double mutation_rate = 0.3;
};

struct RewardConfig {
  double w_latency = 1.0;
  double w_cost = 1.0;
  double w_resilience = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 1.0;
  double overload_threshold = 0.80;
  int required_disjoint_paths = 2;
  int required_segments = 2;
};

struct RunConfig {
  Sp1Config sp1;
  Sp2Config sp2;
  Sp3Config sp3;
  RewardConfig reward;
  std::uint64_t rng_seed = 1;

  /// Throws Error when a field is out of range.
  void validate() const;
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);
std::string dump_run_config(const RunConfig& config);

}  // namespace netgap
