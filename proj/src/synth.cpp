#include "netgap/model.hpp"
#include "netgap/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace netgap {

namespace {

double log_uniform(Rng& rng, double lo, double hi) {
  return std::exp(std::log(lo) + uniform01(rng) * (std::log(hi) - std::log(lo)));
}

std::size_t parse_count(const std::string& s, const std::string& whole) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw Error("invalid part spec '" + whole + "' (expected NAME:PROCS[:MSGS])");
  return v;
}

std::string numbered(const std::string& prefix, std::size_t i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*zu", width, i);
  return prefix + buf;
}

// Largest-remainder split of `total` proportional to the number of ordered
// process pairs in each part.
std::vector<std::size_t> split_messages(const std::vector<PartSpec>& parts, std::size_t total) {
  std::vector<std::size_t> out(parts.size(), 0);
  std::size_t fixed = 0;
  double weight_sum = 0.0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].messages) {
      out[i] = *parts[i].messages;
      fixed += out[i];
    } else {
      const double n = static_cast<double>(parts[i].processes);
      weight_sum += n * (n - 1.0);
    }
  }
  if (fixed > total) throw Error("part message counts exceed the requested total");
  const std::size_t free_total = total - fixed;
  if (free_total == 0) return out;
  if (weight_sum <= 0.0) {
    throw Error("cannot place " + std::to_string(free_total) +
                " messages: no part without an explicit message count has two processes");
  }
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].messages) continue;
    const double n = static_cast<double>(parts[i].processes);
    const double exact = static_cast<double>(free_total) * n * (n - 1.0) / weight_sum;
    out[i] = static_cast<std::size_t>(std::floor(exact));
    assigned += out[i];
    remainders.emplace_back(-(exact - std::floor(exact)), i);
  }
  std::sort(remainders.begin(), remainders.end());
  for (std::size_t k = 0; assigned < free_total; ++k, ++assigned)
    ++out[remainders[k % remainders.size()].second];
  return out;
}

}  // namespace

PartSpec parse_part_spec(const std::string& text) {
  PartSpec spec;
  const auto c1 = text.find(':');
  if (c1 == std::string::npos || c1 == 0)
    throw Error("invalid part spec '" + text + "' (expected NAME:PROCS[:MSGS])");
  spec.name = text.substr(0, c1);
  const auto c2 = text.find(':', c1 + 1);
  spec.processes = parse_count(text.substr(c1 + 1, c2 == std::string::npos ? std::string::npos
                                                                           : c2 - c1 - 1),
                               text);
  if (c2 != std::string::npos) spec.messages = parse_count(text.substr(c2 + 1), text);
  return spec;
}

ApplicationModel generate_synthetic_usecase(std::size_t n_processes, std::size_t n_messages,
                                            const std::vector<PartSpec>& parts,
                                            std::uint64_t seed, const SynthDefaults& d) {
  if (n_processes == 0) throw Error("no processes");
  std::vector<PartSpec> layout = parts;
  if (layout.empty()) layout.push_back({"APP", n_processes, std::nullopt});
  std::size_t sum = 0;
  for (const PartSpec& p : layout) {
    if (p.name.empty()) throw Error("part with an empty name");
    if (p.processes == 0) throw Error("part " + p.name + " has no processes");
    sum += p.processes;
  }
  if (sum != n_processes) {
    throw Error("parts hold " + std::to_string(sum) + " processes but " +
                std::to_string(n_processes) + " were requested");
  }
  const std::vector<std::size_t> per_part = split_messages(layout, n_messages);
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (per_part[i] > 0 && layout[i].processes < 2) {
      throw Error("part " + layout[i].name + " cannot carry messages with a single process");
    }
  }

  Rng rng(derive_seed(seed, 0));
  std::vector<Process> processes;
  processes.reserve(n_processes);
  for (const PartSpec& part : layout) {
    for (std::size_t k = 0; k < part.processes; ++k) {
      Process p;
      p.id = numbered(part.name + "_p", k, 3);
      p.part = part.name;
      p.period_ms = log_uniform(rng, d.period_min_ms, d.period_max_ms);
      p.compute_mops = d.demand_min_mops + uniform01(rng) * (d.demand_max_mops - d.demand_min_mops);
      processes.push_back(std::move(p));
    }
  }

  std::vector<Message> messages;
  messages.reserve(n_messages);
  std::size_t first = 0;
  for (std::size_t pi = 0; pi < layout.size(); ++pi) {
    const std::size_t n = layout[pi].processes;
    // Preferential attachment: endpoints drawn proportionally to (degree + 1).
    std::vector<double> weight(n, 1.0);
    double total = static_cast<double>(n);
    auto draw = [&](std::size_t exclude) {
      const double excluded = exclude < n ? weight[exclude] : 0.0;
      double x = uniform01(rng) * (total - excluded);
      std::size_t last_ok = n;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == exclude) continue;
        last_ok = k;
        if (x < weight[k]) return k;
        x -= weight[k];
      }
      return last_ok;
    };
    for (std::size_t k = 0; k < per_part[pi]; ++k) {
      const std::size_t s = draw(n);
      const std::size_t t = draw(s);
      Message m;
      m.id = numbered("m", messages.size(), 4);
      m.src = processes[first + s].id;
      m.dst = processes[first + t].id;
      m.period_ms = processes[first + s].period_ms;
      m.size_bits = std::round(log_uniform(rng, d.size_min_bits, d.size_max_bits));
      weight[s] += 1.0;
      weight[t] += 1.0;
      total += 2.0;
      messages.push_back(std::move(m));
    }
    first += n;
  }
  return ApplicationModel(std::move(processes), std::move(messages));
}

}  // namespace netgap
