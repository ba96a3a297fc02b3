#include "netgap/report.hpp"

#include <cmath>
#include <cstdio>
#include <map>

namespace netgap {

std::string format_number(double x) {
  if (!std::isfinite(x)) return x > 0 ? "inf" : (x < 0 ? "-inf" : "nan");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::vector<ComparisonRow> comparison_rows(const SearchResult& result, const std::string& run) {
  std::vector<ComparisonRow> rows;
  for (const Candidate& c : result.candidates) {
    const EvaluationReport& r = c.report;
    ComparisonRow row;
    row.run = run;
    row.candidate = c.id;
    row.epoch = c.epoch;
    row.rollout_steps = c.rollout_steps;
    row.feasible = r.gates.all() && r.routing_ok;
    row.reward = r.reward;
    row.latency_score = r.latency_score;
    row.mean_hops = r.h;
    row.mean_disjoint_paths = r.mean_disjoint_paths;
    row.max_link_load = r.x_l;
    row.max_node_load = r.max_node_load;
    row.cost = r.cost;
    row.processing = r.processing_vertices;
    row.switches = r.switch_vertices;
    row.gateways = r.gateway_vertices;
    row.links = r.physical_links;
    row.segments = r.segments;
    row.wall_time_s = c.wall_time_s;
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

const char* const kColumns[] = {"run",          "candidate",        "epoch",           "rollout_steps",
                                "feasible",     "reward",           "latency_score",   "mean_hops",
                                "mean_disjoint_paths", "max_link_load", "max_node_load", "cost",
                                "processing_modules",  "switches",   "gateways",        "links",
                                "segments"};

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string write_comparison_csv(const std::vector<ComparisonRow>& rows, bool with_wall_time) {
  std::string out;
  for (std::size_t i = 0; i < std::size(kColumns); ++i) out += (i ? "," : "") + std::string(kColumns[i]);
  if (with_wall_time) out += ",wall_time_s";
  out += "\r\n";
  for (const ComparisonRow& r : rows) {
    out += quote(r.run) + "," + std::to_string(r.candidate) + "," + std::to_string(r.epoch) + "," +
           std::to_string(r.rollout_steps) + "," + (r.feasible ? "1" : "0") + "," + format_number(r.reward) +
           "," + format_number(r.latency_score) + "," + format_number(r.mean_hops) + "," +
           format_number(r.mean_disjoint_paths) + "," + format_number(r.max_link_load) + "," +
           format_number(r.max_node_load) + "," + format_number(r.cost) + "," + std::to_string(r.processing) +
           "," + std::to_string(r.switches) + "," + std::to_string(r.gateways) + "," + std::to_string(r.links) +
           "," + std::to_string(r.segments);
    if (with_wall_time) out += "," + (r.wall_time_s ? format_number(*r.wall_time_s) : std::string{});
    out += "\r\n";
  }
  return out;
}

std::string write_timing_csv(const std::vector<ComparisonRow>& rows) {
  std::string out = "run,candidate,wall_time_s\r\n";
  for (const ComparisonRow& r : rows) {
    out += quote(r.run) + "," + std::to_string(r.candidate) + "," +
           (r.wall_time_s ? format_number(*r.wall_time_s) : std::string{}) + "\r\n";
  }
  return out;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw Error("csv: unterminated quoted field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

double to_double(const std::string& s, const std::string& column) {
  if (s == "inf") return INFINITY;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw Error("");
    return v;
  } catch (const std::exception&) {
    throw Error("csv: column " + column + ": '" + s + "' is not a number");
  }
}

std::size_t to_count(const std::string& s, const std::string& column) {
  const double v = to_double(s, column);
  if (v < 0 || v != std::floor(v)) throw Error("csv: column " + column + ": '" + s + "' is not a count");
  return static_cast<std::size_t>(v);
}

}  // namespace

std::vector<ComparisonRow> read_comparison_csv(const std::string& text, const std::string* timing_text) {
  const auto table = parse_csv(text);
  if (table.empty()) throw Error("csv: missing header row");
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < table[0].size(); ++i) col[table[0][i]] = i;
  for (const char* name : kColumns)
    if (!col.count(name)) throw Error(std::string("csv: missing column ") + name);

  std::map<std::pair<std::string, std::size_t>, double> timing;
  if (timing_text) {
    const auto t = parse_csv(*timing_text);
    for (std::size_t i = 1; i < t.size(); ++i) {
      if (t[i].size() < 3 || t[i][2].empty()) continue;
      timing[{t[i][0], to_count(t[i][1], "candidate")}] = to_double(t[i][2], "wall_time_s");
    }
  }
  std::vector<ComparisonRow> rows;
  for (std::size_t i = 1; i < table.size(); ++i) {
    const auto& f = table[i];
    if (f.size() != table[0].size())
      throw Error("csv: row " + std::to_string(i + 1) + " has " + std::to_string(f.size()) + " fields");
    auto get = [&](const char* name) -> const std::string& { return f[col.at(name)]; };
    ComparisonRow r;
    r.run = get("run");
    r.candidate = to_count(get("candidate"), "candidate");
    r.epoch = to_count(get("epoch"), "epoch");
    r.rollout_steps = to_count(get("rollout_steps"), "rollout_steps");
    r.feasible = get("feasible") == "1";
    r.reward = to_double(get("reward"), "reward");
    r.latency_score = to_double(get("latency_score"), "latency_score");
    r.mean_hops = to_double(get("mean_hops"), "mean_hops");
    r.mean_disjoint_paths = to_double(get("mean_disjoint_paths"), "mean_disjoint_paths");
    r.max_link_load = to_double(get("max_link_load"), "max_link_load");
    r.max_node_load = to_double(get("max_node_load"), "max_node_load");
    r.cost = to_double(get("cost"), "cost");
    r.processing = to_count(get("processing_modules"), "processing_modules");
    r.switches = to_count(get("switches"), "switches");
    r.gateways = to_count(get("gateways"), "gateways");
    r.links = to_count(get("links"), "links");
    r.segments = to_count(get("segments"), "segments");
    if (auto it = col.find("wall_time_s"); it != col.end() && !f[it->second].empty())
      r.wall_time_s = to_double(f[it->second], "wall_time_s");
    if (auto it = timing.find({r.run, r.candidate}); it != timing.end()) r.wall_time_s = it->second;
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ComparisonRow> load_comparison(const std::filesystem::path& path) {
  std::filesystem::path table = path;
  std::filesystem::path timing;
  if (std::filesystem::is_directory(path)) {
    table = path / "comparison.csv";
    timing = path / "comparison_timing.csv";
  } else {
    timing = path.parent_path() / "comparison_timing.csv";
  }
  const std::string text = read_text_file(table);
  try {
    if (!timing.empty() && std::filesystem::exists(timing)) {
      const std::string t = read_text_file(timing);
      return read_comparison_csv(text, &t);
    }
    return read_comparison_csv(text);
  } catch (const Error& e) {
    throw Error(table.string() + ": " + e.what());
  }
}

}  // namespace netgap
