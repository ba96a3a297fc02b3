#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace netgap {

/// Base class for all input/validation failures raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Process {
  std::string id;
  std::string part;
  double period_ms = 0.0;
  double compute_mops = 0.0;  // computational demand in Mops

  bool operator==(const Process&) const = default;
};

struct Message {
  std::string id;
  std::string src;
  std::string dst;
  double size_bits = 0.0;
  double period_ms = 0.0;
  // Derived: size / period, in Mbit/s.
  double bandwidth_mbps = 0.0;
  // Resolved process indices, populated by validation.
  std::size_t src_index = 0;
  std::size_t dst_index = 0;

  bool operator==(const Message&) const = default;
};

/// Mbit/s of a message of `size_bits` emitted every `period_ms`.
inline double message_bandwidth_mbps(double size_bits, double period_ms) {
  return size_bits / (period_ms * 1000.0);
}

class ApplicationModel {
public:
  ApplicationModel() = default;

  /// Validates processes and messages, resolves message endpoints and derives
  /// bandwidths. Throws Error on any inconsistency.
  ApplicationModel(std::vector<Process> processes, std::vector<Message> messages);

  const std::vector<Process>& processes() const { return processes_; }
  const std::vector<Message>& messages() const { return messages_; }
  const std::vector<std::string>& parts() const { return parts_; }

  std::optional<std::size_t> process_index(const std::string& id) const;
  std::size_t part_index(const std::string& part) const;

  bool operator==(const ApplicationModel& o) const {
    return processes_ == o.processes_ && messages_ == o.messages_;
  }

private:
  std::vector<Process> processes_;
  std::vector<Message> messages_;
  std::vector<std::string> parts_;  // sorted, unique
  std::map<std::string, std::size_t> index_;
};

enum class ModuleKind { processing, switch_, gateway };

std::string to_string(ModuleKind kind);
ModuleKind module_kind_from_string(const std::string& s);

struct ModuleSpec {
  std::string type_name;
  ModuleKind kind = ModuleKind::processing;
  double compute_mops = 0.0;   // w_j
  double link_mbps = 0.0;      // per direction, full duplex
  int max_ports = 1;
  double cost = 0.0;

  bool operator==(const ModuleSpec&) const = default;
};

class ModuleCatalog {
public:
  ModuleCatalog() = default;
  ModuleCatalog(std::vector<ModuleSpec> types, double link_cost);

  const std::vector<ModuleSpec>& types() const { return types_; }
  double link_cost() const { return link_cost_; }

  const ModuleSpec* find(const std::string& type_name) const;
  const ModuleSpec& at(const std::string& type_name) const;

  /// Processing types in catalog order.
  std::vector<const ModuleSpec*> processing_types() const;

  bool operator==(const ModuleCatalog&) const = default;

private:
  std::vector<ModuleSpec> types_;
  double link_cost_ = 0.0;
};

ApplicationModel parse_application_model(const std::string& json_text);
ApplicationModel load_application_model(const std::filesystem::path& path);
std::string dump_application_model(const ApplicationModel& model);
void save_application_model(const ApplicationModel& model, const std::filesystem::path& path);

ModuleCatalog parse_module_catalog(const std::string& json_text);
ModuleCatalog load_module_catalog(const std::filesystem::path& path);
std::string dump_module_catalog(const ModuleCatalog& catalog);

/// The hardware modules of the avionics case study: one processing, one
/// switch and one gateway type, 10u each, links at 0.1u.
ModuleCatalog table1_catalog();

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Synthetic use-case generation ------------------------------------------

struct PartSpec {
  std::string name;
  std::size_t processes = 0;
  std::optional<std::size_t> messages;  // split proportionally when absent
};

struct SynthDefaults {
  double period_min_ms = 5.0;
  double period_max_ms = 200.0;
  double size_min_bits = 64.0;
  double size_max_bits = 8192.0;
  double demand_min_mops = 0.15;
  double demand_max_mops = 0.8;
};

/// Parses "NAME:PROCS[:MSGS]".
PartSpec parse_part_spec(const std::string& text);

ApplicationModel generate_synthetic_usecase(std::size_t n_processes, std::size_t n_messages,
                                            const std::vector<PartSpec>& parts,
                                            std::uint64_t seed,
                                            const SynthDefaults& defaults = {});

}  // namespace netgap
