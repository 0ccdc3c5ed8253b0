#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ionfab/arch_graph.hpp"

namespace ionfab::ising {

// Spins are +1 / -1. In bit-packed form, bit i set means s_i = -1, so the
// all-up configuration is index 0.
using SpinConfig = std::vector<int>;

SpinConfig spins_from_index(std::uint64_t index, int n);
std::uint64_t index_from_spins(const SpinConfig& s);

// H = sum_{i<j} J_ij s_i s_j + sum_i B_i s_i, summed in index order.
double energy(const IsingInstance& inst, const SpinConfig& s);

// Sum of |J_ij| over i<j plus sum of |B_i|; at least 1. Sets tolerances.
double energy_scale(const IsingInstance& inst);

inline constexpr int kMaxBruteForceSpins = 24;

struct GroundStates {
  double energy = 0.0;
  std::uint64_t count = 0;               // all optimal configurations
  std::vector<std::uint64_t> indices;    // smallest `cap` of them, ascending
  bool truncated = false;
  double tolerance = 0.0;                // degeneracy window, absolute
};

// Gray-code enumeration with incremental energies. Configurations within
// 1e-9 * energy_scale of the minimum count as optimal.
GroundStates brute_force_ground_state(const IsingInstance& inst, std::size_t cap = 1024);

inline constexpr int kMaxAdiabaticSpins = 12;

struct TracePoint {
  double s = 0.0;
  double energy = 0.0;        // <H(s)>
  double ising_energy = 0.0;  // <H_Ising>
};

struct AdiabaticRun {
  double total_time = 0.0;
  int steps = 0;
  double overlap = 0.0;           // probability mass on the classical ground space
  double final_ising_energy = 0.0;
  double ground_energy = 0.0;
  std::uint64_t ground_count = 0;
  double max_norm_error = 0.0;    // max | ||psi|| - 1 | over all steps
  std::vector<TracePoint> trace;
};

// Dense statevector evolution under
//   H(s) = -(1 - s) sum_i X_i + s H_Ising / |j0|,   s = t / total_time,
// from |+>^n with first-order Trotter steps dt = total_time / steps; each
// step uses s at its midpoint. Time is in units of 1/|j0| (|j0| = 1 when
// j0 is 0). The trace keeps at most `trace_points` evenly spaced samples.
AdiabaticRun adiabatic_evolve(const IsingInstance& inst, double total_time, int steps,
                              int trace_points = 200);

struct AnnealSchedule {
  double t_start = 10.0;
  double t_end = 0.01;
  int n_temps = 100;
  int sweeps_per_temp = 10;
};

struct AnnealResult {
  SpinConfig spins;
  double energy = 0.0;  // recomputed with energy()
  std::uint64_t accepted = 0;
};

inline constexpr int kMaxAnnealSpins = 10000;

// Single-spin-flip Metropolis over a geometric temperature ladder from
// t_start to t_end, sequential sweeps. At T = 0 only strictly downhill flips
// are taken. Returns the best configuration seen.
AnnealResult anneal_classical(const IsingInstance& inst, const AnnealSchedule& schedule,
                              std::uint64_t seed, const std::optional<SpinConfig>& initial = std::nullopt);

nlohmann::json to_json(const IsingInstance& inst, const GroundStates& g);
nlohmann::json to_json(const AdiabaticRun& run);
nlohmann::json to_json(const AnnealResult& r, const AnnealSchedule& schedule, std::uint64_t seed);

}  // namespace ionfab::ising
