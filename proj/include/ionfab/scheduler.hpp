#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ionfab/arch_model.hpp"
#include "ionfab/circuit.hpp"

namespace ionfab {

struct PhysicalQubit {
  int elu = 0;       // index into ArchitectureSpec::elus
  int position = 0;  // chain position, a memory ion

  auto operator<=>(const PhysicalQubit&) const = default;
};

// Program qubit -> memory ion. Injective.
struct QubitMap {
  std::vector<PhysicalQubit> slots;

  bool operator==(const QubitMap&) const = default;
};

enum class MapStrategy { kRoundRobin, kGreedyInteractionCut, kUser };

// Throws ValidationError when the circuit needs more memory ions than the
// machine has, or a GLOBAL_MS group cannot be kept inside one ELU.
QubitMap assign_qubits(const Circuit& circuit, const ArchitectureSpec& spec, MapStrategy strategy,
                       const QubitMap& user = {});

// Checks injectivity, capacity and that every slot is a memory ion.
void validate_map(const QubitMap& map, const Circuit& circuit, const ArchitectureSpec& spec);

// Two-qubit ops (MS, CNOT) whose operands sit in different ELUs.
int crossing_count(const Circuit& circuit, const QubitMap& map);

struct BestMap {
  QubitMap map;
  int crossings = 0;
};

// Exhaustive search over ELU assignments (qubit 0 varies slowest); the
// lexicographically first assignment among the minimisers wins. Requires
// n_qubits <= 8 and at most 3 ELUs.
BestMap brute_force_best_map(const Circuit& circuit, const ArchitectureSpec& spec);

// "A:3" style user map: {"map": [["A", 3], ["B", 5], ...]} in program-qubit order.
QubitMap qubit_map_from_json(const ArchitectureSpec& spec, const nlohmann::json& doc);
nlohmann::json to_json(const ArchitectureSpec& spec, const QubitMap& map);

// ---------------------------------------------------------------------------

enum class PairSupply { kIdeal, kBuffered };

struct ScheduleOptions {
  PairSupply supply = PairSupply::kIdeal;
  std::uint64_t seed = 0;  // BUFFERED only
  // COLLECTIVE-tier gates are forbidden; distant operands are brought within
  // the fast gate distance by SWAPs.
  bool strict_proximity = false;
  // BUFFERED: give up when the pair supply has not caught up by this time.
  double max_time = 1e6;  // s
};

struct TimelineEntry {
  double start = 0.0;
  double duration = 0.0;
  GateOp op;                         // program operands; SWAP lists the qubits it moves
  int source = -1;                   // index into Circuit::ops, -1 for inserted SWAPs
  std::vector<PhysicalQubit> ions;   // ions held for the whole interval
  std::vector<int> elus;
  std::string resource;              // "1q", "fast", "slow", "global", "measure", "remote:A~B", "swap"
  bool remote = false;
  double pair_wait = 0.0;            // remote only
  double fidelity = 1.0;
  bool isolation_charged = false;    // MEASURE with shuttle_cost_time added
};

struct FidelityBreakdown {
  double gates = 1.0;  // product of per-op fidelities
  double idle = 1.0;   // product over qubits of exp(-idle / T2)
  double total = 1.0;
};

struct ScheduleResult {
  std::vector<TimelineEntry> timeline;  // in start order
  double makespan = 0.0;
  std::uint64_t pairs_consumed = 0;
  std::uint64_t remote_ops = 0;
  int swaps_inserted = 0;
  double pair_wait_total = 0.0;
  std::vector<double> idle_time;  // per program qubit
  std::vector<double> busy_time;
  double fidelity_estimate = 1.0;
  FidelityBreakdown fidelity;
  QubitMap final_map;  // differs from the input only after SWAPs
};

// ASAP list scheduling in (ready time, program order). Durations:
//   X, H, RZ                single_qubit_gate_time
//   MS, CNOT in one ELU      fast gate time within the fast gate distance,
//                            slow gate time otherwise
//   GLOBAL_MS                slow gate time
//   MEASURE                  detection_time (+ shuttle_cost_time, see below)
//   remote MS/CNOT           pair wait + teleport overhead + classical latency
//                            + one single-qubit correction
//   SWAP                     3 fast gates
// With measurement_isolation a MEASURE pays shuttle_cost_time when another
// qubit of its ELU still has ops later in program order.
ScheduleResult schedule(const Circuit& circuit, const QubitMap& map, const ArchitectureSpec& spec,
                        const ScheduleOptions& options = {});

// Recomputes the fidelity product from a result.
FidelityBreakdown fidelity_estimate(const ScheduleResult& result, const ArchitectureSpec& spec);

// start_s, dur_s, gate, operands, elu(s), resource
std::string timeline_csv(const ArchitectureSpec& spec, const ScheduleResult& result);
nlohmann::json to_json(const ArchitectureSpec& spec, const ScheduleResult& result);

}  // namespace ionfab
