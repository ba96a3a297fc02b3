#include "netgap/config.hpp"

#include "netgap/model.hpp"

#include <json.hpp>

using nlohmann::json;

namespace netgap {

namespace {

template <typename T>
void read_field(const json& obj, const char* key, T& out, const std::string& section) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw Error("config field " + section + "." + key + " has the wrong type");
  }
}

void require_at_least_one(int v, const std::string& name) {
  if (v < 1) throw Error("config: " + name + " must be >= 1");
}

}  // namespace

void RunConfig::validate() const {
  require_at_least_one(sp1.max_generations, "sp1.max_generations");
  require_at_least_one(sp1.population, "sp1.population");
  require_at_least_one(sp1.candidate_module_slots, "sp1.candidate_module_slots");
  require_at_least_one(sp1.tournament_size, "sp1.tournament_size");
  if (sp1.elitism < 0 || sp1.elitism > sp1.population)
    throw Error("config: sp1.elitism must be in [0, population]");
  require_at_least_one(sp2.max_epochs, "sp2.max_epochs");
  require_at_least_one(sp2.parallel_rollouts, "sp2.parallel_rollouts");
  require_at_least_one(sp2.max_untried, "sp2.max_untried");
  if (sp2.rollout_depth_cap < 0) throw Error("config: sp2.rollout_depth_cap must be >= 0");
  if (sp2.uct_c < 0.0) throw Error("config: sp2.uct_c must be >= 0");
  require_at_least_one(sp3.max_generations, "sp3.max_generations");
  require_at_least_one(sp3.population, "sp3.population");
  require_at_least_one(sp3.tournament_size, "sp3.tournament_size");
  if (sp3.elitism < 0 || sp3.elitism > sp3.population)
    throw Error("config: sp3.elitism must be in [0, population]");
  const RewardConfig& r = reward;
  if (r.w_latency < 0.0 || r.w_cost < 0.0 || r.w_resilience < 0.0)
    throw Error("config: reward weights must be non-negative");
  if (r.w_latency + r.w_cost + r.w_resilience <= 0.0)
    throw Error("config: reward weights must not all be zero");
  if (!(r.overload_threshold > 0.0 && r.overload_threshold <= 1.0))
    throw Error("config: overload_threshold must lie in (0, 1]");
  if (!(r.gamma > 0.0)) throw Error("config: gamma must be positive");
  require_at_least_one(r.required_disjoint_paths, "reward.required_disjoint_paths");
  require_at_least_one(r.required_segments, "reward.required_segments");
}

RunConfig parse_run_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw Error("config must be a JSON object");
  RunConfig c;
  if (auto it = doc.find("sp1"); it != doc.end()) {
    read_field(*it, "max_generations", c.sp1.max_generations, "sp1");
    read_field(*it, "population", c.sp1.population, "sp1");
    read_field(*it, "candidate_module_slots", c.sp1.candidate_module_slots, "sp1");
    read_field(*it, "tighten_by_threshold", c.sp1.tighten_by_threshold, "sp1");
    read_field(*it, "per_part", c.sp1.per_part, "sp1");
    read_field(*it, "crossover_rate", c.sp1.crossover_rate, "sp1");
    read_field(*it, "tournament_size", c.sp1.tournament_size, "sp1");
    read_field(*it, "elitism", c.sp1.elitism, "sp1");
  }
  if (auto it = doc.find("sp2"); it != doc.end()) {
    read_field(*it, "max_epochs", c.sp2.max_epochs, "sp2");
    read_field(*it, "parallel_rollouts", c.sp2.parallel_rollouts, "sp2");
    read_field(*it, "uct_c", c.sp2.uct_c, "sp2");
    read_field(*it, "rollout_depth_cap", c.sp2.rollout_depth_cap, "sp2");
    read_field(*it, "max_untried", c.sp2.max_untried, "sp2");
    read_field(*it, "log_every", c.sp2.log_every, "sp2");
  }
  if (auto it = doc.find("sp3"); it != doc.end()) {
    read_field(*it, "max_generations", c.sp3.max_generations, "sp3");
    read_field(*it, "population", c.sp3.population, "sp3");
    read_field(*it, "tournament_size", c.sp3.tournament_size, "sp3");
    read_field(*it, "elitism", c.sp3.elitism, "sp3");
    read_field(*it, "crossover_rate", c.sp3.crossover_rate, "sp3");
    read_field(*it, "mutation_rate", c.sp3.mutation_rate, "sp3");
  }
  if (auto it = doc.find("reward"); it != doc.end()) {
    read_field(*it, "w_latency", c.reward.w_latency, "reward");
    read_field(*it, "w_cost", c.reward.w_cost, "reward");
    read_field(*it, "w_resilience", c.reward.w_resilience, "reward");
    read_field(*it, "alpha", c.reward.alpha, "reward");
    read_field(*it, "beta", c.reward.beta, "reward");
    read_field(*it, "gamma", c.reward.gamma, "reward");
    read_field(*it, "overload_threshold", c.reward.overload_threshold, "reward");
    read_field(*it, "required_disjoint_paths", c.reward.required_disjoint_paths, "reward");
    read_field(*it, "required_segments", c.reward.required_segments, "reward");
  }
  read_field(doc, "rng_seed", c.rng_seed, "");
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  try {
    return parse_run_config(read_text_file(path));
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::string dump_run_config(const RunConfig& c) {
  json doc = {
      {"sp1",
       {{"max_generations", c.sp1.max_generations},
        {"population", c.sp1.population},
        {"candidate_module_slots", c.sp1.candidate_module_slots},
        {"tighten_by_threshold", c.sp1.tighten_by_threshold},
        {"per_part", c.sp1.per_part},
        {"crossover_rate", c.sp1.crossover_rate},
        {"tournament_size", c.sp1.tournament_size},
        {"elitism", c.sp1.elitism}}},
      {"sp2",
       {{"max_epochs", c.sp2.max_epochs},
        {"parallel_rollouts", c.sp2.parallel_rollouts},
        {"uct_c", c.sp2.uct_c},
        {"rollout_depth_cap", c.sp2.rollout_depth_cap},
        {"max_untried", c.sp2.max_untried},
        {"log_every", c.sp2.log_every}}},
      {"sp3",
       {{"max_generations", c.sp3.max_generations},
        {"population", c.sp3.population},
        {"tournament_size", c.sp3.tournament_size},
        {"elitism", c.sp3.elitism},
        {"crossover_rate", c.sp3.crossover_rate},
        {"mutation_rate", c.sp3.mutation_rate}}},
      {"reward",
       {{"w_latency", c.reward.w_latency},
        {"w_cost", c.reward.w_cost},
        {"w_resilience", c.reward.w_resilience},
        {"alpha", c.reward.alpha},
        {"beta", c.reward.beta},
        {"gamma", c.reward.gamma},
        {"overload_threshold", c.reward.overload_threshold},
        {"required_disjoint_paths", c.reward.required_disjoint_paths},
        {"required_segments", c.reward.required_segments}}},
      {"rng_seed", c.rng_seed},
  };
  return doc.dump(2) + "\n";
}

}  // namespace netgap
