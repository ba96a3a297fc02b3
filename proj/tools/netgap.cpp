// netgap: topology synthesis from an application model, a module catalog and
// a topology grammar.

#include "netgap/allocation.hpp"
#include "netgap/config.hpp"
#include "netgap/evaluate.hpp"
#include "netgap/grammar.hpp"
#include "netgap/mapping.hpp"
#include "netgap/mcts.hpp"
#include "netgap/model.hpp"
#include "netgap/report.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace netgap;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNoTopology = 2;

std::size_t thread_cap() {
  std::size_t cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("NETGAP_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) cap = static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring NETGAP_THREADS=" << env << "\n";
    }
  }
  return cap;
}

struct Common {
  std::string model, catalog, config;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int epochs = 0;
  std::string weights;
  std::string out = "netgap_out";
};

RunConfig load_config(const Common& c) {
  RunConfig cfg = c.config.empty() ? RunConfig{} : load_run_config(c.config);
  if (c.seed_set) cfg.rng_seed = c.seed;
  if (c.epochs > 0) cfg.sp2.max_epochs = c.epochs;
  if (!c.weights.empty()) {
    std::vector<double> w;
    std::stringstream ss(c.weights);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        w.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw Error("--weights: '" + item + "' is not a number");
      }
    }
    if (w.size() != 3) throw Error("--weights expects w_latency,w_cost,w_resilience");
    cfg.reward.w_latency = w[0];
    cfg.reward.w_cost = w[1];
    cfg.reward.w_resilience = w[2];
  }
  cfg.validate();
  return cfg;
}

ModuleCatalog load_catalog(const std::string& path) {
  return path.empty() ? table1_catalog() : load_module_catalog(path);
}

void add_common(CLI::App* app, Common& c, bool with_search) {
  app->add_option("--model", c.model, "application model (JSON)")->required()->check(CLI::ExistingFile);
  app->add_option("--catalog", c.catalog, "module catalog (JSON); default: built-in processing, switch and gateway modules")
      ->check(CLI::ExistingFile);
  app->add_option("--config", c.config, "run configuration (JSON)")->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "random seed (overrides the configuration)")
      ->each([&c](const std::string&) { c.seed_set = true; });
  app->add_option("--weights", c.weights, "reward weights w_latency,w_cost,w_resilience");
  app->add_option("--out", c.out, "output directory");
  if (with_search) app->add_option("--epochs", c.epochs, "search epochs (overrides the configuration)");
}

class RunLog {
public:
  explicit RunLog(const fs::path& path) : out_(path, std::ios::binary) {
    if (!out_) throw Error("cannot write " + path.string());
  }
  void write(const json& event) {
    std::lock_guard lock(mu_);
    out_ << event.dump() << "\n";
    out_.flush();
  }

private:
  std::ofstream out_;
  std::mutex mu_;
};

AllocationSolution allocate(const ApplicationModel& model, const ModuleCatalog& catalog, const RunConfig& cfg,
                            RunLog* log) {
  Sp1Trace trace;
  AllocationSolution sol = solve_sp1(model, catalog, cfg, cfg.rng_seed, &trace);
  if (log) {
    log->write({{"event", "allocation"},
                {"modules", sol.modules.size()},
                {"cost", sol.cost()},
                {"feasible", sol.feasible},
                {"primary_best_cost", trace.primary_best_cost},
                {"primary_generations", trace.primary_generations},
                {"secondary_generations", trace.secondary_generations}});
  }
  return sol;
}

struct RunOptions {
  std::string grammar;
  std::string initial_topology;
  std::string allocation;
};

// One full synthesis run into `dir`. Returns the exit code.
int run_once(const Common& common, const RunOptions& ro, const RunConfig& cfg, const fs::path& dir,
             const std::string& run_name, std::size_t threads, bool quiet) {
  const ApplicationModel model = load_application_model(common.model);
  const ModuleCatalog catalog = load_catalog(common.catalog);
  const Grammar grammar = load_grammar(ro.grammar);
  SearchOptions opts;
  if (!ro.initial_topology.empty()) opts.start_graph = load_topology(ro.initial_topology);
  for (const Vertex& v : (opts.start_graph ? *opts.start_graph : grammar.start_graph).vertices())
    catalog.at(v.label);

  fs::create_directories(dir);
  RunLog log(dir / "run_log.jsonl");
  log.write({{"event", "start"}, {"run", run_name}, {"seed", cfg.rng_seed}, {"epochs", cfg.sp2.max_epochs}});

  AllocationSolution alloc = ro.allocation.empty() ? allocate(model, catalog, cfg, &log)
                                                   : load_allocation(ro.allocation, model);
  write_text_file(dir / "allocation.json", dump_allocation(alloc, model));
  if (!quiet) {
    std::cerr << run_name << ": allocation uses " << alloc.modules.size() << " processing modules (cost "
              << format_number(alloc.cost()) << (alloc.feasible ? "" : ", INFEASIBLE") << ")\n";
  }

  opts.threads = std::min<std::size_t>(threads, static_cast<std::size_t>(cfg.sp2.parallel_rollouts));
  opts.on_progress = [&](const ProgressEvent& ev) {
    log.write({{"event", "progress"},
               {"epoch", ev.epoch},
               {"best_reward", ev.best_reward < 0 ? 0.0 : ev.best_reward},
               {"candidates", ev.candidates},
               {"feasible_candidates", ev.feasible_candidates},
               {"failed_rollouts", ev.failed_rollouts},
               {"tree_size", ev.tree_size},
               {"elapsed_s", ev.elapsed_s}});
  };
  const SearchResult res = search(grammar, alloc, model, catalog, cfg, cfg.rng_seed, opts);

  const auto rows = comparison_rows(res, run_name);
  write_text_file(dir / "comparison.csv", write_comparison_csv(rows));
  write_text_file(dir / "comparison_timing.csv", write_timing_csv(rows));
  if (res.best_topology) {
    write_text_file(dir / "best_topology.json", dump_topology(*res.best_topology));
    write_text_file(dir / "best_topology.dot", to_dot(*res.best_topology, &catalog, "best_topology"));
    if (res.best_mapping.module_vertex.size() == alloc.modules.size())
      write_text_file(dir / "best_mapping.json", dump_mapping(res.best_mapping, alloc));
  }
  json report = {{"run", run_name},
                 {"seed", cfg.rng_seed},
                 {"found", res.found},
                 {"search", json::parse(dump_search_summary(res))},
                 {"allocation", {{"modules", alloc.modules.size()}, {"cost", alloc.cost()}, {"feasible", alloc.feasible}}},
                 {"wall_time_s", res.wall_time_s}};
  if (res.best_candidate) report["best"] = json::parse(dump_report(res.best_report, &res.best_mapping));
  write_text_file(dir / "report.json", report.dump(2) + "\n");
  log.write({{"event", "done"},
             {"found", res.found},
             {"candidates", res.candidates.size()},
             {"epochs", res.epochs},
             {"wall_time_s", res.wall_time_s}});

  if (!quiet) {
    std::cerr << run_name << ": " << res.epochs << " epochs, " << res.candidates.size() << " candidates, "
              << format_number(res.wall_time_s) << " s\n";
  }
  if (!res.found) {
    std::cerr << run_name << ": no feasible topology found\n";
    return kExitNoTopology;
  }
  const EvaluationReport& b = res.best_report;
  if (!quiet) {
    std::cout << "best candidate " << *res.best_candidate << ": reward " << format_number(b.reward) << ", cost "
              << format_number(b.cost) << ", " << b.processing_vertices << " processing / " << b.switch_vertices
              << " switch / " << b.gateway_vertices << " gateway, " << b.physical_links << " links, " << b.segments
              << " segments, mean disjoint paths " << format_number(b.mean_disjoint_paths) << ", mean hops "
              << format_number(b.h) << ", max link load " << format_number(b.x_l) << ", max node load "
              << format_number(b.max_node_load) << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"netgap: grammar-driven network topology synthesis"};
  app.require_subcommand(1);

  Common run_c;
  RunOptions run_o;
  auto* run = app.add_subcommand("run", "allocate, search topologies, and report the best one");
  add_common(run, run_c, true);
  run->add_option("--grammar", run_o.grammar, "topology grammar")->required()->check(CLI::ExistingFile);
  run->add_option("--initial-topology", run_o.initial_topology, "start the search from this topology (JSON)")
      ->check(CLI::ExistingFile);
  run->add_option("--allocation", run_o.allocation, "reuse an allocation instead of running the allocator")
      ->check(CLI::ExistingFile);

  Common alloc_c;
  auto* alloc_cmd = app.add_subcommand("allocate", "allocate processes to processing modules only");
  add_common(alloc_cmd, alloc_c, false);

  Common eval_c;
  std::string eval_alloc, eval_topology, eval_mapping;
  auto* eval_cmd = app.add_subcommand("evaluate", "score a topology for an allocation");
  add_common(eval_cmd, eval_c, false);
  eval_cmd->add_option("--allocation", eval_alloc, "allocation (JSON)")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--topology", eval_topology, "topology (JSON)")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--mapping", eval_mapping, "module-to-vertex mapping (JSON); searched when omitted")
      ->check(CLI::ExistingFile);

  std::vector<std::string> cmp_inputs;
  std::string cmp_out = "comparison_merged.csv";
  auto* cmp_cmd = app.add_subcommand("compare", "merge comparison tables of several runs");
  cmp_cmd->add_option("inputs", cmp_inputs, "run directories or comparison.csv files")->required();
  cmp_cmd->add_option("--out", cmp_out, "merged CSV file");

  std::size_t gen_procs = 0, gen_msgs = 0;
  std::vector<std::string> gen_parts;
  std::uint64_t gen_seed = 1;
  std::string gen_out = "usecase.json";
  auto* gen_cmd = app.add_subcommand("gen-usecase", "generate a synthetic application model");
  gen_cmd->add_option("--processes", gen_procs, "process count")->required();
  gen_cmd->add_option("--messages", gen_msgs, "message count")->required();
  gen_cmd->add_option("--part", gen_parts, "NAME:PROCESSES[:MESSAGES], repeatable")->required();
  gen_cmd->add_option("--seed", gen_seed, "random seed");
  gen_cmd->add_option("--out", gen_out, "output file");

  Common batch_c;
  RunOptions batch_o;
  std::size_t batch_runs = 1;
  auto* batch_cmd = app.add_subcommand("batch", "independent seeded runs with a merged comparison table");
  add_common(batch_cmd, batch_c, true);
  batch_cmd->add_option("--grammar", batch_o.grammar, "topology grammar")->required()->check(CLI::ExistingFile);
  batch_cmd->add_option("--initial-topology", batch_o.initial_topology, "start topology (JSON)")
      ->check(CLI::ExistingFile);
  batch_cmd->add_option("--runs", batch_runs, "number of runs")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const RunConfig cfg = load_config(run_c);
      return run_once(run_c, run_o, cfg, run_c.out, "run", thread_cap(), false);
    }

    if (*alloc_cmd) {
      const RunConfig cfg = load_config(alloc_c);
      const ApplicationModel model = load_application_model(alloc_c.model);
      const ModuleCatalog catalog = load_catalog(alloc_c.catalog);
      fs::create_directories(alloc_c.out);
      const AllocationSolution sol = allocate(model, catalog, cfg, nullptr);
      write_text_file(fs::path(alloc_c.out) / "allocation.json", dump_allocation(sol, model));
      double max_util = 0.0;
      for (const IncludedModule& m : sol.modules) max_util = std::max(max_util, m.utilization());
      std::cout << sol.modules.size() << " processing modules, cost " << format_number(sol.cost())
                << ", max utilization " << format_number(max_util) << (sol.feasible ? "" : ", INFEASIBLE") << "\n";
      return sol.feasible ? kExitOk : kExitNoTopology;
    }

    if (*eval_cmd) {
      const RunConfig cfg = load_config(eval_c);
      const ApplicationModel model = load_application_model(eval_c.model);
      const ModuleCatalog catalog = load_catalog(eval_c.catalog);
      const AllocationSolution alloc = load_allocation(eval_alloc, model);
      const TopologyGraph topo = load_topology(eval_topology);
      Evaluator ev(topo, model, catalog, alloc, cfg);
      ModuleMapping mapping;
      EvaluationReport rep;
      if (!eval_mapping.empty()) {
        mapping = parse_mapping(read_text_file(eval_mapping), alloc);
        rep = ev.evaluate(mapping);
      } else {
        Sp3Result r = solve_sp3(ev, topo, catalog, alloc, cfg.sp3, cfg.rng_seed);
        mapping = r.mapping;
        rep = r.report;
      }
      fs::create_directories(eval_c.out);
      write_text_file(fs::path(eval_c.out) / "report.json", dump_report(rep, &mapping));
      std::cout << "reward " << format_number(rep.reward) << " (module count "
                << (rep.gates.module_count_ok ? "ok" : "FAIL") << ", disjoint paths "
                << (rep.gates.disjoint_paths_ok ? "ok" : "FAIL") << ", segments "
                << (rep.gates.segments_ok ? "ok" : "FAIL") << "), cost " << format_number(rep.cost) << "\n";
      for (const std::string& n : rep.notes) std::cout << "  " << n << "\n";
      return kExitOk;
    }

    if (*cmp_cmd) {
      std::vector<ComparisonRow> all;
      for (const std::string& in : cmp_inputs) {
        auto rows = load_comparison(in);
        all.insert(all.end(), rows.begin(), rows.end());
      }
      write_text_file(cmp_out, write_comparison_csv(all, true));
      std::cout << all.size() << " candidates from " << cmp_inputs.size() << " inputs\n";
      return kExitOk;
    }

    if (*gen_cmd) {
      std::vector<PartSpec> parts;
      for (const std::string& p : gen_parts) parts.push_back(parse_part_spec(p));
      const ApplicationModel m = generate_synthetic_usecase(gen_procs, gen_msgs, parts, gen_seed);
      save_application_model(m, gen_out);
      std::cout << m.processes().size() << " processes, " << m.messages().size() << " messages -> " << gen_out
                << "\n";
      return kExitOk;
    }

    if (*batch_cmd) {
      const RunConfig base = load_config(batch_c);
      // Validate inputs once before spawning runs.
      load_application_model(batch_c.model);
      load_grammar(batch_o.grammar);
      const std::size_t cap = thread_cap();
      const std::size_t workers = std::min(cap, batch_runs);
      std::vector<int> codes(batch_runs, kExitInput);
      std::vector<std::string> errors(batch_runs);
      std::atomic<std::size_t> next{0};
      auto worker = [&] {
        for (std::size_t i = next++; i < batch_runs; i = next++) {
          RunConfig cfg = base;
          cfg.rng_seed = base.rng_seed + i;
          char name[32];
          std::snprintf(name, sizeof name, "run_%03zu", i);
          try {
            codes[i] = run_once(batch_c, batch_o, cfg, fs::path(batch_c.out) / name, name,
                                std::max<std::size_t>(1, cap / workers), true);
          } catch (const std::exception& e) {
            errors[i] = e.what();
          }
        }
      };
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
      for (std::thread& t : pool) t.join();

      std::vector<ComparisonRow> all;
      std::size_t found = 0;
      for (std::size_t i = 0; i < batch_runs; ++i) {
        if (!errors[i].empty()) throw Error(errors[i]);
        char name[32];
        std::snprintf(name, sizeof name, "run_%03zu", i);
        auto rows = load_comparison(fs::path(batch_c.out) / name);
        all.insert(all.end(), rows.begin(), rows.end());
        if (codes[i] == kExitOk) ++found;
      }
      write_text_file(fs::path(batch_c.out) / "comparison.csv", write_comparison_csv(all, true));
      std::cout << found << " of " << batch_runs << " runs found a feasible topology\n";
      return found > 0 ? kExitOk : kExitNoTopology;
    }
  } catch (const InfeasibleAllocation& e) {
    std::cerr << "error: allocation impossible: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
