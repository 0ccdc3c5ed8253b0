#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace ionfab {

inline constexpr const char* kArchSchemaId = "ionfab-arch/1";

// Atomic species parameters. Frequencies: hyperfine_splitting in Hz,
// linewidth in rad/s.
struct IonSpecies {
  std::string name;
  double mass = 0.0;                  // kg
  double hyperfine_splitting = 0.0;   // Hz
  double linewidth = 0.0;             // rad/s
  double detection_time = 0.0;        // s
  double qubit_coherence_time = 0.0;  // s, T2 of the memory qubit

  bool operator==(const IonSpecies&) const = default;
};

// Field that drives the state-dependent force. The Rabi frequency is either
// given directly or derived from dipole_coupling * field_amplitude / hbar.
struct DriveField {
  std::optional<double> dipole_coupling;  // J m / V
  std::optional<double> field_amplitude;  // V / m
  double effective_wavevector = 0.0;      // rad / m
  double rabi_frequency = 0.0;            // rad / s

  bool operator==(const DriveField&) const = default;
};

// Elementary logic unit: one ion chain with full internal connectivity.
struct EluSpec {
  std::string id;
  int n_ions = 0;
  std::vector<int> comm_ion_indices;
  int fast_gate_distance = 1;           // ion spacings
  double trap_frequency = 0.0;          // rad / s
  double single_qubit_gate_time = 0.0;  // s
  double collision_rate_per_ion = 0.0;  // 1 / s
  double reload_time = 0.0;             // s
  double shuttle_cost_time = 0.0;       // s

  int memory_ion_count() const { return n_ions - static_cast<int>(comm_ion_indices.size()); }
  bool is_comm_ion(int position) const;
  // Chain positions not used for communication, ascending.
  std::vector<int> memory_positions() const;

  bool operator==(const EluSpec&) const = default;
};

struct SwitchSpec {
  int port_count = 0;
  double reconfiguration_time = 0.0;  // s

  bool operator==(const SwitchSpec&) const = default;
};

struct ArchitectureSpec {
  IonSpecies species;
  DriveField drive;
  std::vector<EluSpec> elus;
  SwitchSpec switch_spec;

  // photonic link
  int buffer_capacity = 1;             // pairs per ELU pair
  std::optional<double> pair_lifetime;  // s; unset means pairs never expire
  double attempt_rate = 0.0;           // 1 / s
  double collection_fraction = 0.0;    // F
  double detector_efficiency = 0.0;    // eta_D

  // costs
  double two_qubit_gate_fidelity = 1.0;
  double single_qubit_gate_fidelity = 1.0;
  double measurement_fidelity = 1.0;
  // Duration of the local part of a teleported gate. Unset means
  // 2 * slow gate time + 2 * detection time of the slower ELU.
  std::optional<double> teleport_overhead_time;
  double classical_latency = 1e-6;  // s
  double fast_gate_speedup = 5.0;   // slow gate time / fast gate time
  bool measurement_isolation = true;
  // Communication ions are a second species. Recorded only.
  bool dual_species_comm = false;

  const EluSpec* find_elu(const std::string& id) const;
  int elu_index(const std::string& id) const;  // -1 when absent
  int total_ions() const;
  int total_memory_ions() const;

  bool operator==(const ArchitectureSpec&) const = default;
};

// Species table, backed by an embedded JSON document.
IonSpecies default_species(const std::string& name);
std::vector<std::string> known_species();

struct Violation {
  std::string path;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

ValidationReport validate_architecture(const ArchitectureSpec& spec);

// Throws ValidationError listing every violation.
void require_valid(const ArchitectureSpec& spec);

// Parses an "ionfab-arch/1" document. Throws SchemaError on structure
// problems and ValidationError if the parsed spec violates an invariant.
ArchitectureSpec architecture_from_json(const nlohmann::json& doc);
// Structure only; invariants are left to validate_architecture.
ArchitectureSpec read_architecture_json(const nlohmann::json& doc);
nlohmann::json architecture_to_json(const ArchitectureSpec& spec);

ArchitectureSpec parse_architecture(const std::string& text);
ArchitectureSpec load_architecture(const std::filesystem::path& path);
void save_architecture(const ArchitectureSpec& spec, const std::filesystem::path& path);

// Communication ions alternately at the two chain ends: 0, n-1, 1, n-2, ...
std::vector<int> default_comm_positions(int n_ions, int count);

// Field-by-field comparison with a relative tolerance on doubles; used for
// round trips through files that store frequencies in Hz.
bool approximately_equal(const ArchitectureSpec& a, const ArchitectureSpec& b, double rel_tol);

}  // namespace ionfab
