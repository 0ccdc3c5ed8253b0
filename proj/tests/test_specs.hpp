#pragma once

#include <string>
#include <vector>

#include "ionfab/arch_model.hpp"
#include "ionfab/units.hpp"

namespace testspec {

// Yb171 machine with `n_elus` identical chains, ids A, B, C, ...
// Collisions are off and pairs never expire unless a test turns them on.
inline ionfab::ArchitectureSpec machine(int n_elus, int n_ions, std::vector<int> comm, int d) {
  ionfab::ArchitectureSpec s;
  s.species = ionfab::default_species("Yb171");
  s.drive.effective_wavevector = 2.0 * ionfab::units::kTwoPi / 355e-9;
  s.drive.rabi_frequency = ionfab::units::hz_to_angular(1e6);
  for (int i = 0; i < n_elus; ++i) {
    ionfab::EluSpec e;
    e.id = std::string(1, static_cast<char>('A' + i));
    e.n_ions = n_ions;
    e.comm_ion_indices = comm;
    e.fast_gate_distance = d;
    e.trap_frequency = ionfab::units::hz_to_angular(3e6);
    e.single_qubit_gate_time = 1e-5;
    s.elus.push_back(e);
  }
  s.switch_spec.port_count = static_cast<int>(n_elus * comm.size());
  s.switch_spec.reconfiguration_time = 1e-3;
  s.buffer_capacity = 4;
  s.attempt_rate = 5e5;
  s.collection_fraction = 0.1;
  s.detector_efficiency = 0.2;
  s.two_qubit_gate_fidelity = 0.999;
  return s;
}

inline ionfab::ArchitectureSpec two_by_twenty() { return machine(2, 20, {0, 1, 18, 19}, 4); }

}  // namespace testspec
