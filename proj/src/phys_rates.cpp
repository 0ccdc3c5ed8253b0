#include "ionfab/phys_rates.hpp"

#include <algorithm>
#include <cmath>

#include "ionfab/errors.hpp"
#include "ionfab/report.hpp"
#include "ionfab/units.hpp"

namespace ionfab::rates {
namespace {

void require_positive(double v, const char* name) {
  if (!std::isfinite(v) || !(v > 0.0)) {
    throw DomainError(std::string(name) + " must be finite and > 0");
  }
}

void require_unit(double v, const char* name) {
  if (!std::isfinite(v) || !(v > 0.0 && v <= 1.0)) {
    throw DomainError(std::string(name) + " must lie in (0, 1]");
  }
}

}  // namespace

double rabi_frequency(double dipole_coupling, double field_amplitude) {
  require_positive(dipole_coupling, "dipole coupling");
  require_positive(field_amplitude, "field amplitude");
  return dipole_coupling * field_amplitude / units::kHbar;
}

double state_dependent_force(double wavevector, double rabi) {
  require_positive(wavevector, "wavevector");
  require_positive(rabi, "Rabi frequency");
  return units::kHbar * wavevector * rabi;
}

double recoil_frequency(double wavevector, double mass, int n_ions) {
  require_positive(wavevector, "wavevector");
  require_positive(mass, "mass");
  if (n_ions < 1) throw DomainError("ion count must be >= 1");
  // Single-ion value first, so omega_R(N) == omega_R(1) / N bit for bit.
  return units::kHbar * wavevector * wavevector / (2.0 * mass) / n_ions;
}

double gate_rate(double rabi, double recoil, double trap_frequency) {
  require_positive(rabi, "Rabi frequency");
  require_positive(recoil, "recoil frequency");
  require_positive(trap_frequency, "trap frequency");
  return rabi * std::sqrt(recoil / trap_frequency);
}

double link_success_probability(double collection_fraction, double detector_efficiency) {
  require_unit(collection_fraction, "collection fraction");
  require_unit(detector_efficiency, "detector efficiency");
  const double single = collection_fraction * detector_efficiency;
  return single * single / 2.0;
}

double mean_connection_rate(double attempt_rate, double collection_fraction,
                            double detector_efficiency) {
  require_positive(attempt_rate, "attempt rate");
  return attempt_rate * link_success_probability(collection_fraction, detector_efficiency);
}

double lamb_dicke_parameter(double wavevector, double mass, int n_ions, double trap_frequency) {
  require_positive(wavevector, "wavevector");
  require_positive(mass, "mass");
  require_positive(trap_frequency, "trap frequency");
  if (n_ions < 1) throw DomainError("ion count must be >= 1");
  return wavevector * std::sqrt(units::kHbar / (2.0 * n_ions * mass * trap_frequency));
}

double slow_gate_time(const ArchitectureSpec& spec, const EluSpec& elu) {
  const double recoil =
      recoil_frequency(spec.drive.effective_wavevector, spec.species.mass, elu.n_ions);
  return units::kTwoPi / gate_rate(spec.drive.rabi_frequency, recoil, elu.trap_frequency);
}

double fast_gate_time(const ArchitectureSpec& spec, const EluSpec& elu) {
  return slow_gate_time(spec, elu) / spec.fast_gate_speedup;
}

double teleport_overhead_time(const ArchitectureSpec& spec, const EluSpec& a, const EluSpec& b) {
  if (spec.teleport_overhead_time) return *spec.teleport_overhead_time;
  const double slow = std::max(slow_gate_time(spec, a), slow_gate_time(spec, b));
  return 2.0 * slow + 2.0 * spec.species.detection_time;
}

RateReport rate_report(const ArchitectureSpec& spec, const std::string& elu_id) {
  const EluSpec* elu = spec.find_elu(elu_id);
  if (!elu) throw Error("unknown ELU '" + elu_id + "'");

  RateReport r;
  r.elu = elu->id;
  r.n_ions = elu->n_ions;
  const double k = spec.drive.effective_wavevector;
  const double omega = spec.drive.rabi_frequency;
  r.recoil_frequency = recoil_frequency(k, spec.species.mass, elu->n_ions);
  r.gate_rate_angular = gate_rate(omega, r.recoil_frequency, elu->trap_frequency);
  r.gate_rate = units::angular_to_hz(r.gate_rate_angular);
  r.state_dependent_force = state_dependent_force(k, omega);
  r.link_success_probability =
      link_success_probability(spec.collection_fraction, spec.detector_efficiency);
  r.mean_connection_rate =
      mean_connection_rate(spec.attempt_rate, spec.collection_fraction, spec.detector_efficiency);
  r.slow_gate_time = units::kTwoPi / r.gate_rate_angular;
  r.fast_gate_time = r.slow_gate_time / spec.fast_gate_speedup;
  r.lamb_dicke_parameter = lamb_dicke_parameter(k, spec.species.mass, elu->n_ions,
                                                elu->trap_frequency);
  if (r.lamb_dicke_parameter > kLambDickeWarningThreshold) {
    r.warnings.push_back("Lamb-Dicke parameter " + format_number(r.lamb_dicke_parameter) +
                         " exceeds " + format_number(kLambDickeWarningThreshold) +
                         "; neglected field gradients may matter");
  }
  return r;
}

std::vector<RateReport> rate_reports(const ArchitectureSpec& spec) {
  std::vector<RateReport> out;
  for (const auto& e : spec.elus) out.push_back(rate_report(spec, e.id));
  return out;
}

nlohmann::json to_json(const RateReport& r) {
  return {{"elu", r.elu},
          {"n_ions", r.n_ions},
          {"recoil_frequency", r.recoil_frequency},
          {"gate_rate", r.gate_rate},
          {"gate_rate_angular", r.gate_rate_angular},
          {"state_dependent_force", r.state_dependent_force},
          {"link_success_probability", r.link_success_probability},
          {"mean_connection_rate", r.mean_connection_rate},
          {"slow_gate_time", r.slow_gate_time},
          {"fast_gate_time", r.fast_gate_time},
          {"lamb_dicke_parameter", r.lamb_dicke_parameter},
          {"warnings", r.warnings}};
}

std::vector<std::string> rate_csv_header() {
  return {"elu", "n_ions", "recoil_frequency", "gate_rate", "gate_rate_angular",
          "state_dependent_force", "link_success_probability", "mean_connection_rate",
          "slow_gate_time", "fast_gate_time", "lamb_dicke_parameter"};
}

std::vector<std::string> rate_csv_row(const RateReport& r) {
  return {r.elu,
          std::to_string(r.n_ions),
          format_number(r.recoil_frequency),
          format_number(r.gate_rate),
          format_number(r.gate_rate_angular),
          format_number(r.state_dependent_force),
          format_number(r.link_success_probability),
          format_number(r.mean_connection_rate),
          format_number(r.slow_gate_time),
          format_number(r.fast_gate_time),
          format_number(r.lamb_dicke_parameter)};
}

}  // namespace ionfab::rates
