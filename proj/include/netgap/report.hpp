#pragma once

#include "netgap/mcts.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace netgap {

/// One evaluated terminal candidate, as plotted in the comparison charts.
struct ComparisonRow {
  std::string run;
  std::size_t candidate = 0;
  std::size_t epoch = 0;
  std::size_t rollout_steps = 0;
  bool feasible = false;
  double reward = 0.0;
  double latency_score = 0.0;
  double mean_hops = 0.0;
  double mean_disjoint_paths = 0.0;
  double max_link_load = 0.0;
  double max_node_load = 0.0;
  double cost = 0.0;
  std::size_t processing = 0;
  std::size_t switches = 0;
  std::size_t gateways = 0;
  std::size_t links = 0;
  std::size_t segments = 0;
  std::optional<double> wall_time_s;  // kept out of the deterministic table
};

std::vector<ComparisonRow> comparison_rows(const SearchResult& result, const std::string& run);

/// RFC 4180 table with a header row. Wall time is written only when
/// `with_wall_time` is set (merged tables); per-run tables stay
/// byte-reproducible and carry timing in a separate file.
std::string write_comparison_csv(const std::vector<ComparisonRow>& rows, bool with_wall_time = false);
std::string write_timing_csv(const std::vector<ComparisonRow>& rows);

std::vector<std::vector<std::string>> parse_csv(const std::string& text);

/// Reads a comparison table; when `timing_text` is given, wall times are
/// joined on (run, candidate).
std::vector<ComparisonRow> read_comparison_csv(const std::string& text,
                                               const std::string* timing_text = nullptr);

/// Loads `comparison.csv` (plus `comparison_timing.csv` when present) from a
/// run directory, or a single CSV file.
std::vector<ComparisonRow> load_comparison(const std::filesystem::path& path);

std::string format_number(double x);

}  // namespace netgap
