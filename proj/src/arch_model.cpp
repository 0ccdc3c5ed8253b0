#include "ionfab/arch_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ionfab/errors.hpp"
#include "ionfab/units.hpp"

namespace ionfab {

using nlohmann::json;

bool EluSpec::is_comm_ion(int position) const {
  return std::find(comm_ion_indices.begin(), comm_ion_indices.end(), position) !=
         comm_ion_indices.end();
}

std::vector<int> EluSpec::memory_positions() const {
  std::vector<int> out;
  for (int p = 0; p < n_ions; ++p) {
    if (!is_comm_ion(p)) out.push_back(p);
  }
  return out;
}

const EluSpec* ArchitectureSpec::find_elu(const std::string& id) const {
  for (const auto& e : elus) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

int ArchitectureSpec::elu_index(const std::string& id) const {
  for (std::size_t i = 0; i < elus.size(); ++i) {
    if (elus[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

int ArchitectureSpec::total_ions() const {
  int n = 0;
  for (const auto& e : elus) n += e.n_ions;
  return n;
}

int ArchitectureSpec::total_memory_ions() const {
  int n = 0;
  for (const auto& e : elus) n += e.memory_ion_count();
  return n;
}

std::vector<int> default_comm_positions(int n_ions, int count) {
  std::vector<int> out;
  int lo = 0;
  int hi = n_ions - 1;
  while (static_cast<int>(out.size()) < count && lo <= hi) {
    out.push_back(lo++);
    if (static_cast<int>(out.size()) < count && lo <= hi) out.push_back(hi--);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// validation

namespace {

class Checker {
 public:
  void positive(const std::string& path, double v) {
    if (!std::isfinite(v)) {
      add(path, "must be finite");
    } else if (!(v > 0.0)) {
      add(path, "must be > 0");
    }
  }
  void non_negative(const std::string& path, double v) {
    if (!std::isfinite(v)) {
      add(path, "must be finite");
    } else if (!(v >= 0.0)) {
      add(path, "must be >= 0");
    }
  }
  void unit_interval(const std::string& path, double v, const std::string& name) {
    if (!std::isfinite(v) || !(v > 0.0 && v <= 1.0)) add(path, name + " out of (0,1]");
  }
  void add(const std::string& path, const std::string& msg) {
    report.violations.push_back({path, msg});
  }

  ValidationReport report;
};

}  // namespace

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& v : violations) os << v.path << ": " << v.message << "\n";
  return os.str();
}

ValidationReport validate_architecture(const ArchitectureSpec& spec) {
  Checker c;

  const auto& sp = spec.species;
  c.positive("species.mass", sp.mass);
  c.positive("species.linewidth", sp.linewidth);
  c.positive("species.detection_time", sp.detection_time);
  c.positive("species.qubit_coherence_time", sp.qubit_coherence_time);
  c.non_negative("species.hyperfine_splitting", sp.hyperfine_splitting);

  const auto& dr = spec.drive;
  c.positive("drive.effective_wavevector", dr.effective_wavevector);
  c.positive("drive.rabi_frequency", dr.rabi_frequency);
  if (dr.dipole_coupling) c.positive("drive.dipole_coupling", *dr.dipole_coupling);
  if (dr.field_amplitude) c.positive("drive.field_amplitude", *dr.field_amplitude);
  if (dr.dipole_coupling.has_value() != dr.field_amplitude.has_value()) {
    c.add("drive", "dipole_coupling and field_amplitude must be given together");
  } else if (dr.dipole_coupling && std::isfinite(dr.rabi_frequency)) {
    const double derived = *dr.dipole_coupling * *dr.field_amplitude / units::kHbar;
    if (!(std::abs(derived - dr.rabi_frequency) <= 1e-12 * std::abs(derived))) {
      c.add("drive.rabi_frequency", "inconsistent with dipole_coupling * field_amplitude / hbar");
    }
  }

  if (spec.elus.empty()) c.add("elus", "at least one ELU required");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < spec.elus.size(); ++i) {
    const auto& e = spec.elus[i];
    const std::string p = "elus[" + std::to_string(i) + "]";
    if (e.id.empty()) c.add(p + ".id", "must be non-empty");
    if (!ids.insert(e.id).second) c.add(p + ".id", "duplicate ELU id '" + e.id + "'");
    if (e.n_ions < 1) c.add(p + ".n_ions", "must be >= 1");
    std::set<int> seen;
    for (int idx : e.comm_ion_indices) {
      if (idx < 0 || idx >= e.n_ions) {
        c.add(p + ".comm_ion_indices", "index " + std::to_string(idx) + " outside chain");
      }
      if (!seen.insert(idx).second) {
        c.add(p + ".comm_ion_indices", "duplicate communication ion " + std::to_string(idx));
      }
    }
    // A single-ion chain has no neighbours; d = 1 is accepted for it.
    const int max_d = std::max(1, e.n_ions - 1);
    if (e.fast_gate_distance < 1 || e.fast_gate_distance > max_d) {
      c.add(p + ".fast_gate_distance", "must satisfy 1 <= d < n_ions");
    }
    c.positive(p + ".trap_frequency", e.trap_frequency);
    c.non_negative(p + ".single_qubit_gate_time", e.single_qubit_gate_time);
    c.non_negative(p + ".collision_rate_per_ion", e.collision_rate_per_ion);
    c.non_negative(p + ".reload_time", e.reload_time);
    c.non_negative(p + ".shuttle_cost_time", e.shuttle_cost_time);
  }

  if (spec.switch_spec.port_count < 0) c.add("switch.port_count", "must be >= 0");
  c.non_negative("switch.reconfiguration_time", spec.switch_spec.reconfiguration_time);

  if (spec.buffer_capacity < 0) c.add("link.buffer_capacity", "must be >= 0");
  if (spec.pair_lifetime) c.positive("link.pair_lifetime", *spec.pair_lifetime);
  c.positive("link.attempt_rate", spec.attempt_rate);
  if (std::isfinite(spec.attempt_rate) && std::isfinite(sp.linewidth) &&
      spec.attempt_rate > units::angular_to_hz(sp.linewidth)) {
    c.add("link.attempt_rate", "exceeds emission rate gamma/2pi of the species");
  }
  c.unit_interval("link.collection_fraction", spec.collection_fraction, "collection_fraction");
  c.unit_interval("link.detector_efficiency", spec.detector_efficiency, "detector_efficiency");

  c.unit_interval("costs.two_qubit_gate_fidelity", spec.two_qubit_gate_fidelity,
                  "two_qubit_gate_fidelity");
  c.unit_interval("costs.single_qubit_gate_fidelity", spec.single_qubit_gate_fidelity,
                  "single_qubit_gate_fidelity");
  c.unit_interval("costs.measurement_fidelity", spec.measurement_fidelity,
                  "measurement_fidelity");
  if (spec.teleport_overhead_time) {
    c.non_negative("costs.teleport_overhead_time", *spec.teleport_overhead_time);
  }
  c.non_negative("costs.classical_latency", spec.classical_latency);
  if (!std::isfinite(spec.fast_gate_speedup) || !(spec.fast_gate_speedup >= 1.0)) {
    c.add("costs.fast_gate_speedup", "must be >= 1");
  }
  return c.report;
}

void require_valid(const ArchitectureSpec& spec) {
  auto report = validate_architecture(spec);
  if (!report.ok()) throw ValidationError("invalid architecture:\n" + report.to_string());
}

// ---------------------------------------------------------------------------
// JSON

namespace {

// Reads one JSON object, rejecting keys that were never looked at.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw SchemaError(path_ + ": expected object");
  }

  const json* find(const std::string& key) {
    used_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  const json& require(const std::string& key) {
    const json* v = find(key);
    if (!v) throw SchemaError(child(key) + ": missing required field");
    return *v;
  }

  double number(const std::string& key) { return as_number(require(key), child(key)); }

  std::optional<double> opt_number(const std::string& key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    return as_number(*v, child(key));
  }

  int integer(const std::string& key) { return as_int(require(key), child(key)); }

  std::optional<int> opt_integer(const std::string& key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    return as_int(*v, child(key));
  }

  std::string string(const std::string& key) {
    const json& v = require(key);
    if (!v.is_string()) throw SchemaError(child(key) + ": expected string");
    return v.get<std::string>();
  }

  std::optional<bool> opt_bool(const std::string& key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_boolean()) throw SchemaError(child(key) + ": expected boolean");
    return v->get<bool>();
  }

  void finish() const {
    for (const auto& [key, _] : obj_.items()) {
      if (!used_.count(key)) throw SchemaError(child(key) + ": unknown key");
    }
  }

  std::string child(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  static double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw SchemaError(path + ": expected number");
    return v.get<double>();
  }

  static int as_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) throw SchemaError(path + ": expected integer");
    return v.get<int>();
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> used_;
};

IonSpecies species_from_json(const json& j) {
  ObjectReader r(j, "species");
  const std::string name = r.string("name");
  auto mass = r.opt_number("mass_kg");
  auto hyperfine = r.opt_number("hyperfine_splitting_hz");
  auto linewidth = r.opt_number("linewidth_hz");
  auto detection = r.opt_number("detection_time_s");
  auto coherence = r.opt_number("coherence_time_s");
  r.finish();

  // A species outside the table is accepted when every constant is supplied.
  IonSpecies s;
  if (mass && hyperfine && linewidth && detection && coherence) {
    s.name = name;
  } else {
    s = default_species(name);
  }
  if (mass) s.mass = *mass;
  if (hyperfine) s.hyperfine_splitting = *hyperfine;
  if (linewidth) s.linewidth = units::hz_to_angular(*linewidth);
  if (detection) s.detection_time = *detection;
  if (coherence) s.qubit_coherence_time = *coherence;
  return s;
}

DriveField drive_from_json(const json& j) {
  ObjectReader r(j, "drive");
  DriveField d;
  d.effective_wavevector = r.number("effective_wavevector_per_m");
  d.dipole_coupling = r.opt_number("dipole_coupling_jm_per_v");
  d.field_amplitude = r.opt_number("field_amplitude_v_per_m");
  auto rabi_hz = r.opt_number("rabi_frequency_hz");
  r.finish();
  if (rabi_hz) {
    d.rabi_frequency = units::hz_to_angular(*rabi_hz);
  } else if (d.dipole_coupling && d.field_amplitude) {
    d.rabi_frequency = *d.dipole_coupling * *d.field_amplitude / units::kHbar;
  } else {
    throw SchemaError(
        "drive: need rabi_frequency_hz or both dipole_coupling_jm_per_v and "
        "field_amplitude_v_per_m");
  }
  return d;
}

EluSpec elu_from_json(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  EluSpec e;
  e.id = r.string("id");
  e.n_ions = r.integer("n_ions");
  const json* comm = r.find("comm_ions");
  auto n_comm = r.opt_integer("n_comm_ions");
  if (comm && n_comm) throw SchemaError(path + ": give comm_ions or n_comm_ions, not both");
  if (comm) {
    if (!comm->is_array()) throw SchemaError(r.child("comm_ions") + ": expected array");
    for (std::size_t i = 0; i < comm->size(); ++i) {
      e.comm_ion_indices.push_back(
          ObjectReader::as_int((*comm)[i], r.child("comm_ions") + "[" + std::to_string(i) + "]"));
    }
  } else {
    e.comm_ion_indices = default_comm_positions(e.n_ions, n_comm.value_or(std::min(2, e.n_ions)));
  }
  e.fast_gate_distance = r.integer("fast_gate_distance");
  e.trap_frequency = units::hz_to_angular(r.number("trap_frequency_hz"));
  e.single_qubit_gate_time = r.number("single_qubit_gate_time_s");
  e.collision_rate_per_ion = r.opt_number("collision_rate_per_ion_hz").value_or(0.0);
  e.reload_time = r.opt_number("reload_time_s").value_or(0.0);
  e.shuttle_cost_time = r.opt_number("shuttle_cost_time_s").value_or(0.0);
  r.finish();
  return e;
}

}  // namespace

ArchitectureSpec read_architecture_json(const json& doc) {
  ObjectReader top(doc, "");
  ArchitectureSpec spec;
  if (const json* schema = top.find("schema")) {
    if (!schema->is_string() || schema->get<std::string>() != kArchSchemaId) {
      throw SchemaError(std::string("schema: expected \"") + kArchSchemaId + "\"");
    }
  }
  spec.species = species_from_json(top.require("species"));
  spec.drive = drive_from_json(top.require("drive"));

  const json& elus = top.require("elus");
  if (!elus.is_array()) throw SchemaError("elus: expected array");
  for (std::size_t i = 0; i < elus.size(); ++i) {
    spec.elus.push_back(elu_from_json(elus[i], "elus[" + std::to_string(i) + "]"));
  }

  {
    ObjectReader r(top.require("switch"), "switch");
    spec.switch_spec.port_count = r.integer("port_count");
    spec.switch_spec.reconfiguration_time = r.number("reconfiguration_time_s");
    r.finish();
  }
  {
    ObjectReader r(top.require("link"), "link");
    spec.attempt_rate = r.number("attempt_rate_hz");
    spec.collection_fraction = r.number("collection_fraction");
    spec.detector_efficiency = r.number("detector_efficiency");
    spec.buffer_capacity = r.integer("buffer_capacity");
    spec.pair_lifetime = r.opt_number("pair_lifetime_s");
    r.finish();
  }
  {
    ObjectReader r(top.require("costs"), "costs");
    spec.two_qubit_gate_fidelity = r.number("two_qubit_gate_fidelity");
    if (auto v = r.opt_number("single_qubit_gate_fidelity")) spec.single_qubit_gate_fidelity = *v;
    if (auto v = r.opt_number("measurement_fidelity")) spec.measurement_fidelity = *v;
    spec.teleport_overhead_time = r.opt_number("teleport_overhead_time_s");
    if (auto v = r.opt_number("classical_latency_s")) spec.classical_latency = *v;
    if (auto v = r.opt_number("fast_gate_speedup")) spec.fast_gate_speedup = *v;
    if (auto v = r.opt_bool("measurement_isolation")) spec.measurement_isolation = *v;
    if (auto v = r.opt_bool("dual_species_comm")) spec.dual_species_comm = *v;
    r.finish();
  }
  top.finish();
  return spec;
}

ArchitectureSpec architecture_from_json(const json& doc) {
  ArchitectureSpec spec = read_architecture_json(doc);
  require_valid(spec);
  return spec;
}

json architecture_to_json(const ArchitectureSpec& spec) {
  json doc;
  doc["schema"] = kArchSchemaId;
  const auto& sp = spec.species;
  doc["species"] = {{"name", sp.name},
                    {"mass_kg", sp.mass},
                    {"hyperfine_splitting_hz", sp.hyperfine_splitting},
                    {"linewidth_hz", units::angular_to_hz(sp.linewidth)},
                    {"detection_time_s", sp.detection_time},
                    {"coherence_time_s", sp.qubit_coherence_time}};

  json drive = {{"effective_wavevector_per_m", spec.drive.effective_wavevector},
                {"rabi_frequency_hz", units::angular_to_hz(spec.drive.rabi_frequency)}};
  if (spec.drive.dipole_coupling) drive["dipole_coupling_jm_per_v"] = *spec.drive.dipole_coupling;
  if (spec.drive.field_amplitude) drive["field_amplitude_v_per_m"] = *spec.drive.field_amplitude;
  doc["drive"] = drive;

  json elus = json::array();
  for (const auto& e : spec.elus) {
    elus.push_back({{"id", e.id},
                    {"n_ions", e.n_ions},
                    {"comm_ions", e.comm_ion_indices},
                    {"fast_gate_distance", e.fast_gate_distance},
                    {"trap_frequency_hz", units::angular_to_hz(e.trap_frequency)},
                    {"single_qubit_gate_time_s", e.single_qubit_gate_time},
                    {"collision_rate_per_ion_hz", e.collision_rate_per_ion},
                    {"reload_time_s", e.reload_time},
                    {"shuttle_cost_time_s", e.shuttle_cost_time}});
  }
  doc["elus"] = elus;
  doc["switch"] = {{"port_count", spec.switch_spec.port_count},
                   {"reconfiguration_time_s", spec.switch_spec.reconfiguration_time}};

  json link = {{"attempt_rate_hz", spec.attempt_rate},
               {"collection_fraction", spec.collection_fraction},
               {"detector_efficiency", spec.detector_efficiency},
               {"buffer_capacity", spec.buffer_capacity}};
  if (spec.pair_lifetime) link["pair_lifetime_s"] = *spec.pair_lifetime;
  doc["link"] = link;

  json costs = {{"two_qubit_gate_fidelity", spec.two_qubit_gate_fidelity},
                {"single_qubit_gate_fidelity", spec.single_qubit_gate_fidelity},
                {"measurement_fidelity", spec.measurement_fidelity},
                {"classical_latency_s", spec.classical_latency},
                {"fast_gate_speedup", spec.fast_gate_speedup},
                {"measurement_isolation", spec.measurement_isolation},
                {"dual_species_comm", spec.dual_species_comm}};
  if (spec.teleport_overhead_time) costs["teleport_overhead_time_s"] = *spec.teleport_overhead_time;
  doc["costs"] = costs;
  return doc;
}

ArchitectureSpec parse_architecture(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("malformed JSON: ") + e.what());
  }
  return architecture_from_json(doc);
}

ArchitectureSpec load_architecture(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_architecture(ss.str());
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

void save_architecture(const ArchitectureSpec& spec, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << architecture_to_json(spec).dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path.string());
}

namespace {

bool close(double a, double b, double rel) {
  if (a == b) return true;
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

bool close(const std::optional<double>& a, const std::optional<double>& b, double rel) {
  if (a.has_value() != b.has_value()) return false;
  return !a || close(*a, *b, rel);
}

}  // namespace

bool approximately_equal(const ArchitectureSpec& a, const ArchitectureSpec& b, double rel) {
  const auto& sa = a.species;
  const auto& sb = b.species;
  if (sa.name != sb.name || !close(sa.mass, sb.mass, rel) ||
      !close(sa.hyperfine_splitting, sb.hyperfine_splitting, rel) ||
      !close(sa.linewidth, sb.linewidth, rel) || !close(sa.detection_time, sb.detection_time, rel) ||
      !close(sa.qubit_coherence_time, sb.qubit_coherence_time, rel)) {
    return false;
  }
  if (!close(a.drive.dipole_coupling, b.drive.dipole_coupling, rel) ||
      !close(a.drive.field_amplitude, b.drive.field_amplitude, rel) ||
      !close(a.drive.effective_wavevector, b.drive.effective_wavevector, rel) ||
      !close(a.drive.rabi_frequency, b.drive.rabi_frequency, rel)) {
    return false;
  }
  if (a.elus.size() != b.elus.size()) return false;
  for (std::size_t i = 0; i < a.elus.size(); ++i) {
    const auto& x = a.elus[i];
    const auto& y = b.elus[i];
    if (x.id != y.id || x.n_ions != y.n_ions || x.comm_ion_indices != y.comm_ion_indices ||
        x.fast_gate_distance != y.fast_gate_distance || !close(x.trap_frequency, y.trap_frequency, rel) ||
        !close(x.single_qubit_gate_time, y.single_qubit_gate_time, rel) ||
        !close(x.collision_rate_per_ion, y.collision_rate_per_ion, rel) ||
        !close(x.reload_time, y.reload_time, rel) ||
        !close(x.shuttle_cost_time, y.shuttle_cost_time, rel)) {
      return false;
    }
  }
  return a.switch_spec.port_count == b.switch_spec.port_count &&
         close(a.switch_spec.reconfiguration_time, b.switch_spec.reconfiguration_time, rel) &&
         a.buffer_capacity == b.buffer_capacity && close(a.pair_lifetime, b.pair_lifetime, rel) &&
         close(a.attempt_rate, b.attempt_rate, rel) &&
         close(a.collection_fraction, b.collection_fraction, rel) &&
         close(a.detector_efficiency, b.detector_efficiency, rel) &&
         close(a.two_qubit_gate_fidelity, b.two_qubit_gate_fidelity, rel) &&
         close(a.single_qubit_gate_fidelity, b.single_qubit_gate_fidelity, rel) &&
         close(a.measurement_fidelity, b.measurement_fidelity, rel) &&
         close(a.teleport_overhead_time, b.teleport_overhead_time, rel) &&
         close(a.classical_latency, b.classical_latency, rel) &&
         close(a.fast_gate_speedup, b.fast_gate_speedup, rel) &&
         a.measurement_isolation == b.measurement_isolation &&
         a.dual_species_comm == b.dual_species_comm;
}

}  // namespace ionfab
