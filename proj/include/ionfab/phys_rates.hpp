#pragma once

#include <string>
#include <vector>

#include "ionfab/arch_model.hpp"

namespace ionfab::rates {

// Omega = mu * E0 / hbar, rad/s.
double rabi_frequency(double dipole_coupling, double field_amplitude);

// |F_x| = hbar * k * Omega, newtons.
double state_dependent_force(double wavevector, double rabi);

// omega_R = hbar k^2 / (2 N m), rad/s.
double recoil_frequency(double wavevector, double mass, int n_ions);

// R_gate = Omega * sqrt(omega_R / omega), rad/s.
double gate_rate(double rabi, double recoil, double trap_frequency);

// p = (F eta_D)^2 / 2 for two-photon Bell-state heralding.
double link_success_probability(double collection_fraction, double detector_efficiency);

// R * p, 1/s.
double mean_connection_rate(double attempt_rate, double collection_fraction,
                            double detector_efficiency);

// eta = k * sqrt(hbar / (2 N m omega)).
double lamb_dicke_parameter(double wavevector, double mass, int n_ions, double trap_frequency);

inline constexpr double kLambDickeWarningThreshold = 0.3;

// Duration charged for one collective (slow) two-qubit gate: one period of
// R_gate, i.e. 2 pi / R_gate.
double slow_gate_time(const ArchitectureSpec& spec, const EluSpec& elu);
// slow_gate_time / fast_gate_speedup.
double fast_gate_time(const ArchitectureSpec& spec, const EluSpec& elu);
// Configured teleport overhead, or the default derived from the two ELUs.
double teleport_overhead_time(const ArchitectureSpec& spec, const EluSpec& a, const EluSpec& b);

struct RateReport {
  std::string elu;
  int n_ions = 0;
  double recoil_frequency = 0.0;          // rad/s
  double gate_rate = 0.0;                 // Hz (R_gate / 2pi)
  double gate_rate_angular = 0.0;         // rad/s
  double state_dependent_force = 0.0;     // N
  double link_success_probability = 0.0;  // dimensionless
  double mean_connection_rate = 0.0;      // 1/s
  double slow_gate_time = 0.0;            // s
  double fast_gate_time = 0.0;            // s
  double lamb_dicke_parameter = 0.0;
  std::vector<std::string> warnings;
};

RateReport rate_report(const ArchitectureSpec& spec, const std::string& elu_id);
std::vector<RateReport> rate_reports(const ArchitectureSpec& spec);

nlohmann::json to_json(const RateReport& report);
std::vector<std::string> rate_csv_header();
std::vector<std::string> rate_csv_row(const RateReport& report);

}  // namespace ionfab::rates
