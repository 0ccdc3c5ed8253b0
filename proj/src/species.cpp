#include "ionfab/arch_model.hpp"
#include "ionfab/errors.hpp"
#include "ionfab/units.hpp"

namespace ionfab {
namespace {

// Frequencies are stored in Hz here (linewidth as gamma / 2pi) and converted
// on lookup. Mass in unified atomic mass units.
constexpr const char* kSpeciesTable = R"json({
  "Yb171": {
    "mass_u": 170.9363258,
    "hyperfine_splitting_hz": 12.642812e9,
    "linewidth_hz": 10.0e6,
    "detection_time_s": 20.0e-6,
    "coherence_time_s": 1000.0
  }
})json";

const nlohmann::json& species_table() {
  static const nlohmann::json table = nlohmann::json::parse(kSpeciesTable);
  return table;
}

}  // namespace

IonSpecies default_species(const std::string& name) {
  const auto& table = species_table();
  auto it = table.find(name);
  if (it == table.end()) throw UnknownSpecies(name);
  const auto& row = *it;
  IonSpecies s;
  s.name = name;
  s.mass = row.at("mass_u").get<double>() * units::kAtomicMassUnit;
  s.hyperfine_splitting = row.at("hyperfine_splitting_hz").get<double>();
  s.linewidth = units::hz_to_angular(row.at("linewidth_hz").get<double>());
  s.detection_time = row.at("detection_time_s").get<double>();
  s.qubit_coherence_time = row.at("coherence_time_s").get<double>();
  return s;
}

std::vector<std::string> known_species() {
  std::vector<std::string> names;
  for (const auto& [key, _] : species_table().items()) names.push_back(key);
  return names;
}

}  // namespace ionfab
