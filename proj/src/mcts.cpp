#include "netgap/mcts.hpp"

#include "netgap/mapping.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <deque>
#include <set>
#include <thread>

#include <json.hpp>

using nlohmann::json;

namespace netgap {

std::size_t uct_select(const std::vector<ChildStats>& children, double parent_visits, double c) {
  if (children.empty()) throw Error("uct_select on a node without children");
  const double log_n = std::log(std::max(parent_visits, 1.0));
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < children.size(); ++i) {
    const ChildStats& ch = children[i];
    if (!(ch.visits >= 1.0)) throw Error("uct_select on an unvisited child");
    const double value = ch.total_reward / ch.visits + c * std::sqrt(log_n / ch.visits);
    if (value > best_value) {
      best_value = value;
      best = i;
    }
  }
  return best;
}

SelectionStep select_step(const SearchNode& node, const std::vector<SearchNode>& tree, double c, Rng& rng) {
  SelectionStep step;
  if (node.dead) {
    step.leaf = true;
    return step;
  }
  if (!node.untried.empty()) {
    step.expand = true;
    step.index = uniform_index(rng, node.untried.size());
    return step;
  }
  if (node.children.empty()) {
    step.leaf = true;
    return step;
  }
  std::vector<ChildStats> stats;
  stats.reserve(node.children.size());
  for (std::size_t k : node.children) stats.push_back({tree[k].total_reward, tree[k].visits});
  step.index = uct_select(stats, node.visits, c);
  return step;
}

namespace {

std::map<std::string, std::size_t> processing_counts(const TopologyGraph& g, const ModuleCatalog& catalog) {
  std::map<std::string, std::size_t> counts;
  for (const Vertex& v : g.vertices())
    if (catalog.at(v.label).kind == ModuleKind::processing) ++counts[v.label];
  return counts;
}

bool mutually_reachable(const TopologyGraph& g, const ModuleCatalog& catalog) {
  const auto& vs = g.vertices();
  std::vector<bool> proc(vs.size());
  std::vector<std::size_t> procs;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    proc[i] = catalog.at(vs[i].label).kind == ModuleKind::processing;
    if (proc[i]) procs.push_back(i);
  }
  std::vector<int> seen(vs.size(), -1);
  for (std::size_t src : procs) {
    const int mark = static_cast<int>(src);
    std::deque<std::size_t> queue{src};
    seen[src] = mark;
    std::size_t reached = 1;
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      if (u != src && proc[u]) continue;
      for (VertexId w : g.out_neighbors(vs[u].id)) {
        const std::size_t k = g.ordinal(w);
        if (seen[k] == mark) continue;
        seen[k] = mark;
        if (proc[k]) ++reached;
        queue.push_back(k);
      }
    }
    if (reached != procs.size()) return false;
  }
  return true;
}

bool overshoots(const TopologyGraph& g, const ModuleCatalog& catalog,
                const std::map<std::string, std::size_t>& required, const std::set<std::string>& removable) {
  for (const auto& [label, n] : processing_counts(g, catalog)) {
    if (removable.count(label)) continue;
    auto it = required.find(label);
    if (n > (it == required.end() ? 0 : it->second)) return true;
  }
  return false;
}

}  // namespace

bool is_terminal(const TopologyGraph& g, const ModuleCatalog& catalog,
                 const std::map<std::string, std::size_t>& required) {
  auto counts = processing_counts(g, catalog);
  std::map<std::string, std::size_t> want;
  for (const auto& [label, n] : required)
    if (n > 0) want[label] = n;
  return counts == want && mutually_reachable(g, catalog);
}

std::vector<std::string> removable_labels(const Grammar& grammar) {
  std::set<std::string> out;
  for (const ProductionRule& r : grammar.rules) {
    if (r.relabel) {
      if (r.lhs.nodes[0].label != r.rhs.nodes[0].label) out.insert(r.lhs.nodes[0].label);
      continue;
    }
    for (std::size_t i = 0; i < r.lhs.nodes.size(); ++i)
      if (!r.lhs_to_rhs[i]) out.insert(r.lhs.nodes[i].label);
  }
  return {out.begin(), out.end()};
}

RolloutResult rollout(const TopologyGraph& start, const Grammar& grammar, const ModuleCatalog& catalog,
                      const std::map<std::string, std::size_t>& required, std::size_t depth_cap, Rng& rng) {
  const auto removable_list = removable_labels(grammar);
  const std::set<std::string> removable(removable_list.begin(), removable_list.end());
  RolloutResult res;
  res.graph = start;
  std::vector<Action> actions;
  for (;;) {
    if (is_terminal(res.graph, catalog, required)) {
      res.success = true;
      return res;
    }
    if (overshoots(res.graph, catalog, required, removable)) {
      res.failure = "overshoot";
      return res;
    }
    if (res.steps >= depth_cap) {
      res.failure = "depth cap";
      return res;
    }
    actions.clear();
    for (std::size_t r = 0; r < grammar.rules.size(); ++r) enumerate_rule_matches(res.graph, grammar, r, actions);
    if (actions.empty()) {
      res.failure = "dead end";
      return res;
    }
    apply_action_in_place(res.graph, grammar, actions[uniform_index(rng, actions.size())]);
    ++res.steps;
  }
}

std::size_t default_depth_cap(const AllocationSolution& allocation) {
  // Required modules plus as many switches again, four actions each.
  return std::max<std::size_t>(1, 4 * (2 * allocation.modules.size()));
}

namespace {

using Clock = std::chrono::steady_clock;

struct Pending {
  std::size_t epoch = 0;
  std::vector<std::size_t> path;  // root .. leaf
  std::size_t leaf = 0;
  bool reuse = false;   // leaf reward already known
  double reward = 0.0;
  // Filled by the worker.
  bool evaluated = false;
  RolloutResult roll;
  Sp3Result sp3;
};

class Search {
public:
  Search(const Grammar& grammar, const AllocationSolution& alloc, const ApplicationModel& model,
         const ModuleCatalog& catalog, const RunConfig& config, std::uint64_t seed, const SearchOptions& opts)
      : grammar_(grammar), alloc_(alloc), model_(model), catalog_(catalog), config_(config), seed_(seed),
        opts_(opts), required_(alloc.type_counts()) {
    const auto rem = removable_labels(grammar);
    removable_.insert(rem.begin(), rem.end());
    depth_cap_ = config.sp2.rollout_depth_cap > 0 ? static_cast<std::size_t>(config.sp2.rollout_depth_cap)
                                                 : default_depth_cap(alloc);
  }

  SearchResult run() {
    const auto t0 = Clock::now();
    tree_.emplace_back();
    tree_[0].graph = opts_.start_graph ? *opts_.start_graph : grammar_.start_graph;
    Rng root_rng(derive_seed(seed_, 0xffffffffULL));
    init_node(0, root_rng);

    const auto epochs = static_cast<std::size_t>(config_.sp2.max_epochs);
    const auto batch = static_cast<std::size_t>(std::max(1, config_.sp2.parallel_rollouts));
    const auto log_every = static_cast<std::size_t>(std::max(1, config_.sp2.log_every));
    std::size_t epoch = 0;
    while (epoch < epochs) {
      std::vector<Pending> pending;
      for (std::size_t b = 0; b < batch && epoch < epochs; ++b, ++epoch) pending.push_back(select(epoch));
      run_pending(pending);
      for (Pending& p : pending) {
        finish(p, t0);
        const std::size_t done = p.epoch + 1;
        if (opts_.on_progress && (done % log_every == 0 || done == epochs)) {
          ProgressEvent ev;
          ev.epoch = done;
          ev.best_reward = best_reward_;
          ev.candidates = result_.candidates.size();
          ev.feasible_candidates = feasible_;
          ev.tree_size = tree_.size();
          ev.failed_rollouts = result_.failed_rollouts;
          ev.elapsed_s = seconds_since(t0);
          opts_.on_progress(ev);
        }
      }
    }
    result_.epochs = epoch;
    result_.tree_size = tree_.size();
    result_.wall_time_s = seconds_since(t0);
    if (opts_.keep_tree) result_.tree = std::move(tree_);
    return std::move(result_);
  }

private:
  const Grammar& grammar_;
  const AllocationSolution& alloc_;
  const ApplicationModel& model_;
  const ModuleCatalog& catalog_;
  const RunConfig& config_;
  std::uint64_t seed_;
  const SearchOptions& opts_;
  std::map<std::string, std::size_t> required_;
  std::set<std::string> removable_;
  std::size_t depth_cap_ = 0;
  std::vector<SearchNode> tree_;
  SearchResult result_;
  double best_reward_ = -1.0;
  std::size_t feasible_ = 0;

  static double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
  }

  void init_node(std::size_t k, Rng& rng) {
    SearchNode& n = tree_[k];
    n.terminal = is_terminal(n.graph, catalog_, required_);
    n.dead = overshoots(n.graph, catalog_, required_, removable_);
    if (n.dead) return;
    n.untried = enumerate_actions(n.graph, grammar_);
    const auto cap = static_cast<std::size_t>(config_.sp2.max_untried);
    if (cap > 0 && n.untried.size() > cap) {
      // Keep a uniform sample, in enumeration order.
      std::vector<std::size_t> idx(n.untried.size());
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      for (std::size_t i = 0; i < cap; ++i) std::swap(idx[i], idx[i + uniform_index(rng, idx.size() - i)]);
      idx.resize(cap);
      std::sort(idx.begin(), idx.end());
      std::vector<Action> kept;
      kept.reserve(cap);
      for (std::size_t i : idx) kept.push_back(std::move(n.untried[i]));
      n.untried = std::move(kept);
    }
  }

  Pending select(std::size_t epoch) {
    Rng rng(derive_seed(seed_, epoch));
    Pending p;
    p.epoch = epoch;
    std::size_t k = 0;
    p.path.push_back(0);
    for (;;) {
      const SelectionStep step = select_step(tree_[k], tree_, config_.sp2.uct_c, rng);
      if (step.leaf) {
        p.leaf = k;
        const SearchNode& n = tree_[k];
        p.reuse = n.terminal_reward.has_value() || !n.terminal || n.dead;
        p.reward = n.terminal_reward.value_or(0.0);
        break;
      }
      if (step.expand) {
        SearchNode child;
        child.action = tree_[k].untried[step.index];
        tree_[k].untried.erase(tree_[k].untried.begin() + static_cast<std::ptrdiff_t>(step.index));
        child.graph = apply_action(tree_[k].graph, grammar_, *child.action);
        child.parent = k;
        const std::size_t c = tree_.size();
        tree_.push_back(std::move(child));
        tree_[k].children.push_back(c);
        init_node(c, rng);
        p.path.push_back(c);
        p.leaf = c;
        break;
      }
      k = tree_[k].children[step.index];
      p.path.push_back(k);
    }
    // Virtual loss: count the visit now, add the reward when it arrives.
    for (std::size_t v : p.path) tree_[v].visits += 1.0;
    return p;
  }

  void work(Pending& p) {
    if (p.reuse) return;
    Rng rng(derive_seed(seed_, p.epoch) ^ 0x726f6c6c6f7574ULL);
    const SearchNode& leaf = tree_[p.leaf];
    if (leaf.dead) {
      p.roll.failure = "overshoot";
      return;
    }
    p.roll = rollout(leaf.graph, grammar_, catalog_, required_, depth_cap_, rng);
    if (!p.roll.success) return;
    Evaluator ev(p.roll.graph, model_, catalog_, alloc_, config_);
    p.sp3 = solve_sp3(ev, p.roll.graph, catalog_, alloc_, config_.sp3, derive_seed(seed_, p.epoch + (1ULL << 40)));
    p.evaluated = true;
    p.reward = p.sp3.report.reward;
  }

  void run_pending(std::vector<Pending>& pending) {
    const std::size_t workers = std::min(pending.size(), std::max<std::size_t>(1, opts_.threads));
    if (workers <= 1) {
      for (Pending& p : pending) work(p);
      return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < pending.size(); i = next++) work(pending[i]);
      });
    }
    for (std::thread& t : pool) t.join();
  }

  void finish(Pending& p, Clock::time_point t0) {
    if (!p.reuse) {
      if (!p.roll.success) {
        ++result_.failed_rollouts;
        ++result_.failure_counts[p.roll.failure.empty() ? "unknown" : p.roll.failure];
      } else {
        Candidate c;
        c.id = result_.candidates.size();
        c.epoch = p.epoch;
        c.rollout_steps = p.roll.steps;
        c.wall_time_s = seconds_since(t0);
        c.report = p.sp3.report;
        const bool feasible = c.report.gates.all() && c.report.routing_ok;
        if (feasible) ++feasible_;
        if (p.roll.steps == 0) tree_[p.leaf].terminal_reward = p.reward;
        const bool better = p.reward > best_reward_ || (feasible && !result_.found);
        if (better) {
          best_reward_ = p.reward;
          result_.found = feasible;
          result_.best_topology = std::move(p.roll.graph);
          result_.best_mapping = p.sp3.mapping;
          result_.best_report = p.sp3.report;
          result_.best_candidate = c.id;
        }
        result_.candidates.push_back(std::move(c));
      }
    }
    for (std::size_t v : p.path) tree_[v].total_reward += p.reward;
    ++tree_[p.leaf].own_visits;
    tree_[p.leaf].own_reward += p.reward;
  }
};

}  // namespace

SearchResult search(const Grammar& grammar, const AllocationSolution& allocation, const ApplicationModel& model,
                    const ModuleCatalog& catalog, const RunConfig& config, std::uint64_t seed,
                    const SearchOptions& options) {
  Search s(grammar, allocation, model, catalog, config, seed, options);
  return s.run();
}

std::string dump_search_summary(const SearchResult& r) {
  std::size_t feasible = 0;
  for (const Candidate& c : r.candidates)
    if (c.report.gates.all() && c.report.routing_ok) ++feasible;
  json doc = {{"found", r.found},
              {"epochs", r.epochs},
              {"tree_size", r.tree_size},
              {"candidates", r.candidates.size()},
              {"feasible_candidates", feasible},
              {"failed_rollouts", r.failed_rollouts},
              {"failures", r.failure_counts},
              {"best_reward", r.best_candidate ? json(r.best_report.reward) : json(nullptr)},
              {"best_candidate", r.best_candidate ? json(*r.best_candidate) : json(nullptr)}};
  return doc.dump(2) + "\n";
}

}  // namespace netgap
