#include "netgap/model.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

using nlohmann::json;

namespace netgap {

namespace {

std::string field_path(const std::string& array, std::size_t i, const std::string& field) {
  return array + "[" + std::to_string(i) + "]." + field;
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw Error("expected an object at " + path);
  auto it = obj.find(key);
  if (it == obj.end()) throw Error("missing field " + path);
  return *it;
}

double require_number(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number()) throw Error("field " + path + " must be a number");
  return v.get<double>();
}

std::string require_string(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_string()) throw Error("field " + path + " must be a string");
  return v.get<std::string>();
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset nlohmann reports into line/column.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error("JSON parse error at line " + std::to_string(line) + ", column " +
                std::to_string(col) + ": " + e.what());
  }
}

}  // namespace

ApplicationModel::ApplicationModel(std::vector<Process> processes, std::vector<Message> messages)
    : processes_(std::move(processes)), messages_(std::move(messages)) {
  if (processes_.empty()) throw Error("no processes");
  std::set<std::string> parts;
  for (std::size_t i = 0; i < processes_.size(); ++i) {
    const Process& p = processes_[i];
    if (p.id.empty()) throw Error("process " + std::to_string(i) + " has an empty id");
    if (!(p.period_ms > 0.0))
      throw Error("process " + p.id + ": period must be positive");
    if (!(p.compute_mops >= 0.0))
      throw Error("process " + p.id + ": compute demand must be non-negative");
    if (!index_.emplace(p.id, i).second) throw Error("duplicate process id " + p.id);
    parts.insert(p.part);
  }
  parts_.assign(parts.begin(), parts.end());

  std::set<std::string> message_ids;
  for (Message& m : messages_) {
    if (!message_ids.insert(m.id).second) throw Error("duplicate message id " + m.id);
    auto s = index_.find(m.src);
    auto d = index_.find(m.dst);
    if (s == index_.end())
      throw Error("message " + m.id + ": unknown source process " + m.src);
    if (d == index_.end())
      throw Error("message " + m.id + ": unknown destination process " + m.dst);
    if (m.src == m.dst) throw Error("message " + m.id + ": source equals destination");
    if (!(m.period_ms > 0.0)) throw Error("message " + m.id + ": period must be positive");
    if (!(m.size_bits >= 0.0)) throw Error("message " + m.id + ": size must be non-negative");
    m.src_index = s->second;
    m.dst_index = d->second;
    m.bandwidth_mbps = message_bandwidth_mbps(m.size_bits, m.period_ms);
  }
}

std::optional<std::size_t> ApplicationModel::process_index(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t ApplicationModel::part_index(const std::string& part) const {
  auto it = std::lower_bound(parts_.begin(), parts_.end(), part);
  if (it == parts_.end() || *it != part) throw Error("unknown part " + part);
  return static_cast<std::size_t>(it - parts_.begin());
}

std::string to_string(ModuleKind kind) {
  switch (kind) {
    case ModuleKind::processing: return "processing";
    case ModuleKind::switch_: return "switch";
    case ModuleKind::gateway: return "gateway";
  }
  return "?";
}

ModuleKind module_kind_from_string(const std::string& s) {
  if (s == "processing") return ModuleKind::processing;
  if (s == "switch") return ModuleKind::switch_;
  if (s == "gateway") return ModuleKind::gateway;
  throw Error("unknown module kind '" + s + "'");
}

ModuleCatalog::ModuleCatalog(std::vector<ModuleSpec> types, double link_cost)
    : types_(std::move(types)), link_cost_(link_cost) {
  if (link_cost_ < 0.0) throw Error("link_cost must be non-negative");
  std::set<std::string> names;
  bool has_processing = false;
  for (const ModuleSpec& t : types_) {
    if (t.type_name.empty()) throw Error("module type with empty type_name");
    if (!names.insert(t.type_name).second) throw Error("duplicate type_name " + t.type_name);
    if (t.compute_mops < 0.0 || t.link_mbps < 0.0)
      throw Error("module type " + t.type_name + ": negative capacity");
    if (t.cost < 0.0) throw Error("module type " + t.type_name + ": negative cost");
    if (t.max_ports < 1) throw Error("module type " + t.type_name + ": max_ports must be >= 1");
    if (t.kind == ModuleKind::processing) {
      has_processing = true;
      if (!(t.compute_mops > 0.0) || !(t.link_mbps > 0.0))
        throw Error("processing module type " + t.type_name + ": capacities must be positive");
    }
  }
  if (!has_processing) throw Error("catalog has no processing module type");
}

const ModuleSpec* ModuleCatalog::find(const std::string& type_name) const {
  for (const ModuleSpec& t : types_)
    if (t.type_name == type_name) return &t;
  return nullptr;
}

const ModuleSpec& ModuleCatalog::at(const std::string& type_name) const {
  const ModuleSpec* t = find(type_name);
  if (t == nullptr) throw Error("unknown module type '" + type_name + "'");
  return *t;
}

std::vector<const ModuleSpec*> ModuleCatalog::processing_types() const {
  std::vector<const ModuleSpec*> out;
  for (const ModuleSpec& t : types_)
    if (t.kind == ModuleKind::processing) out.push_back(&t);
  return out;
}

ApplicationModel parse_application_model(const std::string& json_text) {
  json doc = parse_json(json_text);
  if (!doc.is_object()) throw Error("application model must be a JSON object");
  const json& procs = require(doc, "processes", "processes");
  if (!procs.is_array()) throw Error("field processes must be an array");
  std::vector<Process> processes;
  for (std::size_t i = 0; i < procs.size(); ++i) {
    const json& p = procs[i];
    Process proc;
    proc.id = require_string(p, "id", field_path("processes", i, "id"));
    proc.part = p.value("part", std::string{});
    proc.period_ms = require_number(p, "period_ms", field_path("processes", i, "period_ms"));
    proc.compute_mops =
        require_number(p, "compute_mops", field_path("processes", i, "compute_mops"));
    processes.push_back(std::move(proc));
  }
  std::vector<Message> messages;
  if (auto it = doc.find("messages"); it != doc.end()) {
    if (!it->is_array()) throw Error("field messages must be an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json& m = (*it)[i];
      Message msg;
      msg.id = require_string(m, "id", field_path("messages", i, "id"));
      msg.src = require_string(m, "src", field_path("messages", i, "src"));
      msg.dst = require_string(m, "dst", field_path("messages", i, "dst"));
      msg.size_bits = require_number(m, "size_bits", field_path("messages", i, "size_bits"));
      msg.period_ms = require_number(m, "period_ms", field_path("messages", i, "period_ms"));
      messages.push_back(std::move(msg));
    }
  }
  return ApplicationModel(std::move(processes), std::move(messages));
}

ApplicationModel load_application_model(const std::filesystem::path& path) {
  try {
    return parse_application_model(read_text_file(path));
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::string dump_application_model(const ApplicationModel& model) {
  json procs = json::array();
  for (const Process& p : model.processes()) {
    procs.push_back({{"id", p.id},
                     {"part", p.part},
                     {"period_ms", p.period_ms},
                     {"compute_mops", p.compute_mops}});
  }
  json msgs = json::array();
  for (const Message& m : model.messages()) {
    msgs.push_back({{"id", m.id},
                    {"src", m.src},
                    {"dst", m.dst},
                    {"size_bits", m.size_bits},
                    {"period_ms", m.period_ms},
                    {"bandwidth_mbps", m.bandwidth_mbps}});
  }
  json doc = {{"processes", procs}, {"messages", msgs}};
  return doc.dump(2) + "\n";
}

void save_application_model(const ApplicationModel& model, const std::filesystem::path& path) {
  write_text_file(path, dump_application_model(model));
}

ModuleCatalog parse_module_catalog(const std::string& json_text) {
  json doc = parse_json(json_text);
  if (!doc.is_object()) throw Error("module catalog must be a JSON object");
  const json& types = require(doc, "module_types", "module_types");
  if (!types.is_array()) throw Error("field module_types must be an array");
  std::vector<ModuleSpec> specs;
  for (std::size_t i = 0; i < types.size(); ++i) {
    const json& t = types[i];
    ModuleSpec s;
    s.type_name = require_string(t, "type_name", field_path("module_types", i, "type_name"));
    s.kind = module_kind_from_string(
        require_string(t, "kind", field_path("module_types", i, "kind")));
    s.compute_mops = t.value("compute_mops", 0.0);
    s.link_mbps = require_number(t, "link_mbps", field_path("module_types", i, "link_mbps"));
    s.max_ports = t.value("max_ports", 1);
    s.cost = require_number(t, "cost", field_path("module_types", i, "cost"));
    if (t.contains("duplex") && t["duplex"] != "full")
      throw Error("field " + field_path("module_types", i, "duplex") + ": only 'full' is supported");
    specs.push_back(std::move(s));
  }
  return ModuleCatalog(std::move(specs), doc.value("link_cost", 0.0));
}

ModuleCatalog load_module_catalog(const std::filesystem::path& path) {
  try {
    return parse_module_catalog(read_text_file(path));
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::string dump_module_catalog(const ModuleCatalog& catalog) {
  json types = json::array();
  for (const ModuleSpec& t : catalog.types()) {
    types.push_back({{"type_name", t.type_name},
                     {"kind", to_string(t.kind)},
                     {"compute_mops", t.compute_mops},
                     {"link_mbps", t.link_mbps},
                     {"max_ports", t.max_ports},
                     {"duplex", "full"},
                     {"cost", t.cost}});
  }
  json doc = {{"link_cost", catalog.link_cost()}, {"module_types", types}};
  return doc.dump(2) + "\n";
}

ModuleCatalog table1_catalog() {
  return ModuleCatalog(
      {
          {"M", ModuleKind::processing, 2.7, 100.0, 1, 10.0},
          {"S", ModuleKind::switch_, 0.0, 100.0, 6, 10.0},
          {"G", ModuleKind::gateway, 0.0, 100.0, 2, 10.0},
      },
      0.1);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace netgap
