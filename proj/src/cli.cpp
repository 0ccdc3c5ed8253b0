#include "ionfab/cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <chrono>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "ionfab/arch_graph.hpp"
#include "ionfab/arch_model.hpp"
#include "ionfab/circuit.hpp"
#include "ionfab/errors.hpp"
#include "ionfab/ising_oracle.hpp"
#include "ionfab/netsim.hpp"
#include "ionfab/phys_rates.hpp"
#include "ionfab/qec_codes.hpp"
#include "ionfab/report.hpp"
#include "ionfab/scheduler.hpp"

namespace ionfab::cli {

using nlohmann::json;

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 failed");
  }
  std::ostringstream ss;
  for (unsigned int i = 0; i < len; ++i) ss << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
  return ss.str();
}

namespace {

// Misuse detected after parsing, e.g. a stochastic command without --seed.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::optional<std::uint64_t> seed;
  std::string format = "json";
  std::string out;
  bool summary = false;
};

struct Manifest {
  std::string subcommand;
  json inputs = json::array();
  std::vector<std::string> outputs;
};

struct Context {
  std::ostream& out;
  std::ostream& err;
  Common common;
  Manifest manifest;

  std::string load(const std::string& path) {
    std::string text = read_file(path);
    manifest.inputs.push_back({{"path", path}, {"sha256", sha256_hex(text)}});
    return text;
  }

  json load_json(const std::string& path) {
    const std::string text = load(path);
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      throw SchemaError(path + ": malformed JSON: " + e.what());
    }
  }

  ArchitectureSpec arch(const std::string& path) {
    const std::string text = load(path);
    try {
      return parse_architecture(text);
    } catch (const SchemaError& e) {
      throw SchemaError(path + ": " + e.what());
    }
  }

  std::uint64_t need_seed(const std::string& what) const {
    if (!common.seed) throw UsageError(what + " is stochastic; pass --seed N");
    return *common.seed;
  }

  void write(const std::string& text, const std::string& path) {
    emit_text(text, path, out);
    if (!path.empty() && path != "-") manifest.outputs.push_back(path);
  }

  // Machine output to --out (or stdout); --summary text to stdout, replacing
  // the machine output when no --out is given.
  void emit(const std::string& data, const std::string& summary_text) {
    if (common.summary) {
      if (!common.out.empty() && common.out != "-") write(data, common.out);
      out << summary_text;
      return;
    }
    write(data, common.out);
  }
};

void add_common(CLI::App* sub, Common& c, const std::vector<std::string>& formats) {
  sub->add_option("--seed", c.seed, "Random seed (required by stochastic commands)");
  sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember(formats))->capture_default_str();
  sub->add_option("--out", c.out, "Write data to PATH instead of stdout");
  sub->add_flag("--summary", c.summary, "Print a human-readable summary");
}

std::string fmt(double v) { return format_number(v); }

// ---------------------------------------------------------------------------

void run_validate(Context& ctx, const std::string& path) {
  const json doc = ctx.load_json(path);
  const ArchitectureSpec spec = [&] {
    try {
      return read_architecture_json(doc);
    } catch (const SchemaError& e) {
      throw SchemaError(path + ": " + e.what());
    }
  }();
  const auto report = validate_architecture(spec);
  json violations = json::array();
  for (const auto& v : report.violations) violations.push_back({{"path", v.path}, {"message", v.message}});
  const json result = {{"ok", report.ok()}, {"violations", violations}};
  std::string summary = report.ok() ? "valid\n" : report.to_string();
  if (!summary.empty() && summary.back() != '\n') summary += "\n";
  ctx.emit(json_text(result), summary);
  if (!report.ok()) throw ValidationError(std::to_string(report.violations.size()) + " invariant(s) violated");
}

void run_rates(Context& ctx, const std::string& path, const std::string& elu) {
  const ArchitectureSpec spec = ctx.arch(path);
  std::vector<rates::RateReport> reports;
  if (elu.empty()) {
    reports = rates::rate_reports(spec);
  } else {
    reports.push_back(rates::rate_report(spec, elu));
  }
  for (const auto& r : reports) {
    for (const auto& w : r.warnings) ctx.err << "warning: " << r.elu << ": " << w << "\n";
  }
  std::string data;
  if (ctx.common.format == "csv") {
    CsvTable t;
    t.header = rates::rate_csv_header();
    for (const auto& r : reports) t.rows.push_back(rates::rate_csv_row(r));
    data = t.str();
  } else {
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(rates::to_json(r));
    data = json_text({{"schema", "ionfab-rates/1"}, {"elus", arr}});
  }
  std::ostringstream s;
  for (const auto& r : reports) {
    s << r.elu << ": N=" << r.n_ions << "  R_gate/2pi=" << fmt(r.gate_rate) << " Hz  tau_slow=" << fmt(r.slow_gate_time)
      << " s  tau_fast=" << fmt(r.fast_gate_time) << " s  link rate=" << fmt(r.mean_connection_rate) << " Hz\n";
  }
  ctx.emit(data, s.str());
}

void run_graph(Context& ctx, const std::string& path, const std::string& tier, bool profile) {
  const ArchitectureSpec spec = ctx.arch(path);
  const InteractionGraph g = build_interaction_graph(spec);
  std::optional<EdgeTier> only;
  if (tier == "fast") only = EdgeTier::kFast;
  if (tier == "collective") only = EdgeTier::kCollective;
  std::string data;
  if (profile) {
    const auto p = graph_distance_profile(g, tier == "fast" ? TierSet::kFast : TierSet::kCollective);
    json hist = json::object();
    for (auto [d, c] : p.histogram) hist[std::to_string(d)] = c;
    data = json_text({{"tier", tier}, {"histogram", hist}, {"unreachable_pairs", p.unreachable_pairs},
                      {"max_distance", p.max_distance}});
  } else if (ctx.common.format == "dot") {
    data = to_dot(g, only);
  } else {
    json doc = to_json(g, only);
    doc["schema"] = "ionfab-graph/1";
    data = json_text(doc);
  }
  std::ostringstream s;
  s << g.node_count() << " ions, " << g.count(EdgeTier::kFast) << " fast edges, " << g.count(EdgeTier::kCollective)
    << " collective edges\n";
  ctx.emit(data, s.str());
}

// ---------------------------------------------------------------------------

IsingInstance load_instance(Context& ctx, const std::string& path) {
  const json doc = ctx.load_json(path);
  try {
    return ising_from_json(doc);
  } catch (const SchemaError& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

struct IsingArgs {
  std::string instance;
  std::optional<int> n;
  double alpha = 1.0;
  double j0 = -1.0;
  bool allow_any_alpha = false;
  std::vector<int> layers;
  bool full = false;
  std::size_t cap = 1024;
  double time = 50.0;
  int steps = 5000;
  int trace_points = 200;
  ising::AnnealSchedule anneal;
};

void run_ising_generate(Context& ctx, const IsingArgs& a) {
  if (a.n.has_value() == !a.layers.empty()) throw UsageError("give either --n or --layers");
  const IsingInstance inst =
      a.n ? power_law_couplings(*a.n, a.alpha, a.j0, a.allow_any_alpha) : boltzmann_topology(a.layers, a.full);
  std::ostringstream s;
  s << inst.n_spins() << " spins, " << inst.support_edge_count() << " couplings\n";
  ctx.emit(json_text(to_json(inst)), s.str());
}

void run_ising_solve(Context& ctx, const IsingArgs& a) {
  const IsingInstance inst = load_instance(ctx, a.instance);
  const auto g = ising::brute_force_ground_state(inst, a.cap);
  std::ostringstream s;
  s << "ground energy " << fmt(g.energy) << ", " << g.count << " optimal configuration(s)\n";
  ctx.emit(json_text(ising::to_json(inst, g)), s.str());
}

void run_ising_adiabatic(Context& ctx, const IsingArgs& a) {
  const IsingInstance inst = load_instance(ctx, a.instance);
  const auto run = ising::adiabatic_evolve(inst, a.time, a.steps, a.trace_points);
  std::string data;
  if (ctx.common.format == "csv") {
    CsvTable t;
    t.header = {"s", "energy", "ising_energy"};
    for (const auto& p : run.trace) t.rows.push_back({fmt(p.s), fmt(p.energy), fmt(p.ising_energy)});
    data = t.str();
  } else {
    data = json_text(ising::to_json(run));
  }
  std::ostringstream s;
  s << "overlap " << fmt(run.overlap) << " with " << run.ground_count << " ground state(s) at T = " << fmt(a.time)
    << ", " << a.steps << " steps\n";
  ctx.emit(data, s.str());
}

void run_ising_anneal(Context& ctx, const IsingArgs& a) {
  const std::uint64_t seed = ctx.need_seed("ising anneal");
  const IsingInstance inst = load_instance(ctx, a.instance);
  const auto r = ising::anneal_classical(inst, a.anneal, seed);
  std::ostringstream s;
  s << "best energy " << fmt(r.energy) << "\n";
  ctx.emit(json_text(ising::to_json(r, a.anneal, seed)), s.str());
}

// ---------------------------------------------------------------------------

struct QecArgs {
  int d = 3;
  int levels = 1;
  std::string h1;
  std::string h2;
  std::optional<int> rep;
  std::optional<int> rep2;
  std::string code;
  std::string host = "grid";
  std::string placement = "row_major";
  std::string partition = "greedy";
  std::string user_map;
};

void emit_code(Context& ctx, const qec::QecGraph& g) {
  std::ostringstream s;
  s << g.family << ": " << g.n_data << " data, " << g.checks.size() << " checks ("
    << g.check_count(qec::CheckType::kX) << " X, " << g.check_count(qec::CheckType::kZ) << " Z), max weight "
    << g.max_check_weight();
  if (g.logical_qubits) s << ", k = " << *g.logical_qubits;
  s << "\n";
  ctx.emit(json_text(to_json(g)), s.str());
}

void run_qec_hgp(Context& ctx, const QecArgs& a) {
  qec::BinaryMatrix h1;
  qec::BinaryMatrix h2;
  if (a.rep) {
    if (!a.h1.empty() || !a.h2.empty()) throw UsageError("--rep excludes --h1/--h2");
    h1 = qec::repetition_code(*a.rep);
    h2 = qec::repetition_code(a.rep2.value_or(*a.rep));
  } else {
    if (a.h1.empty() || a.h2.empty()) throw UsageError("give --h1 and --h2, or --rep");
    h1 = qec::parse_binary_csv(ctx.load(a.h1));
    h2 = qec::parse_binary_csv(ctx.load(a.h2));
  }
  emit_code(ctx, qec::hypergraph_product_graph(h1, h2));
}

void run_qec_embed(Context& ctx, const QecArgs& a) {
  qec::QecGraph code;
  {
    const json doc = ctx.load_json(a.code);
    try {
      code = qec::qec_from_json(doc);
    } catch (const SchemaError& e) {
      throw SchemaError(a.code + ": " + e.what());
    }
  }
  qec::EmbeddingReport report;
  if (a.host == "grid") {
    qec::GridPlacement p = qec::GridPlacement::kRowMajor;
    std::uint64_t seed = ctx.common.seed.value_or(0);
    if (a.placement == "random") {
      p = qec::GridPlacement::kRandom;
      seed = ctx.need_seed("random placement");
    } else if (a.placement == "native") {
      p = qec::GridPlacement::kNative;
    } else if (a.placement != "row_major") {
      throw UsageError("--placement must be row_major, random or native");
    }
    report = qec::embed_on_grid(code, p, seed);
  } else {
    const ArchitectureSpec spec = ctx.arch(a.host);
    std::vector<std::string> user;
    qec::Partition part = qec::Partition::kGreedyCut;
    if (a.partition == "round_robin") {
      part = qec::Partition::kRoundRobin;
    } else if (a.partition == "user") {
      part = qec::Partition::kUserMap;
      if (a.user_map.empty()) throw UsageError("--partition user needs --user-map");
      const json doc = ctx.load_json(a.user_map);
      if (!doc.is_array()) throw SchemaError(a.user_map + ": expected an array of ELU ids");
      user = doc.get<std::vector<std::string>>();
    } else if (a.partition != "greedy") {
      throw UsageError("--partition must be greedy, round_robin or user");
    }
    report = qec::embed_on_modular(code, spec, part, user);
  }
  std::ostringstream s;
  s << report.host << ": swaps " << report.swap_count << ", max check span " << report.max_check_span;
  if (report.host == "modular") {
    s << ", pairs per round " << report.pairs_per_round << ", max intra route " << report.max_intra_route_length;
  }
  s << "\n";
  json doc = to_json(report);
  doc["schema"] = "ionfab-embedding/1";
  ctx.emit(json_text(doc), s.str());
}

// ---------------------------------------------------------------------------

struct SimArgs {
  std::string arch;
  std::string schedule;
  std::string demand;
  double horizon = 0.0;
  std::string log;
  int replicates = 1;
  bool no_collisions = false;
  unsigned threads = 0;
  std::optional<double> p;
};

void run_simulate(Context& ctx, const SimArgs& a) {
  const std::uint64_t seed = ctx.need_seed("simulate");
  const ArchitectureSpec spec = ctx.arch(a.arch);
  std::vector<netsim::ScheduledConfig> sched;
  if (!a.schedule.empty()) {
    sched = netsim::schedule_from_json(spec, ctx.load_json(a.schedule));
  } else {
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < static_cast<int>(spec.elus.size()); ++i) {
      for (int j = i + 1; j < static_cast<int>(spec.elus.size()); ++j) pairs.emplace_back(i, j);
    }
    sched.push_back({0.0, netsim::auto_config(spec, pairs)});
  }
  std::vector<netsim::PairRequest> demand;
  if (!a.demand.empty()) demand = netsim::demand_from_json(spec, ctx.load_json(a.demand));
  if (a.replicates < 1) throw UsageError("--replicates must be >= 1");
  if (a.replicates > 1 && !a.log.empty()) throw UsageError("--log needs a single replicate");

  netsim::SimOptions opts;
  opts.collisions = !a.no_collisions;
  opts.success_probability = a.p;
  opts.record_events = !a.log.empty();
  const double analytic = rates::mean_connection_rate(spec.attempt_rate, spec.collection_fraction,
                                                      spec.detector_efficiency);
  std::ostringstream s;
  if (a.replicates == 1) {
    const auto r = netsim::run_sim(spec, sched, demand, a.horizon, seed, opts);
    if (!a.log.empty()) ctx.write(netsim::events_csv(r.events), a.log);
    std::string data;
    if (ctx.common.format == "csv") {
      CsvTable t;
      t.header = {"link", "elu_a", "elu_b", "attempts", "successes", "measured_rate"};
      for (const auto& l : r.links) {
        t.rows.push_back({l.label, l.elu_a, l.elu_b, std::to_string(l.attempts), std::to_string(l.successes),
                          fmt(static_cast<double>(l.successes) / r.horizon)});
      }
      data = t.str();
    } else {
      data = json_text(netsim::to_json(r));
    }
    s << "horizon " << fmt(r.horizon) << " s, " << r.links.size() << " link(s), " << r.successes
      << " successes, " << fmt(r.measured_rate) << " Hz total (" << fmt(analytic) << " Hz per link analytic), ledger "
      << (r.ledger.balanced() ? "balanced" : "UNBALANCED") << "\n";
    ctx.emit(data, s.str());
    return;
  }
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < a.replicates; ++i) seeds.push_back(seed + static_cast<std::uint64_t>(i));
  const auto runs = netsim::run_ensemble(spec, sched, demand, a.horizon, seeds, opts, a.threads);
  netsim::SimSummary total;
  json arr = json::array();
  CsvTable t;
  t.header = {"seed", "attempts", "successes", "measured_rate", "balanced"};
  for (const auto& r : runs) {
    total = total.merged(netsim::SimSummary::of(r));
    arr.push_back({{"seed", r.seed}, {"attempts", r.attempts}, {"successes", r.successes},
                   {"measured_rate", r.measured_rate}, {"balanced", r.ledger.balanced()}});
    t.rows.push_back({std::to_string(r.seed), std::to_string(r.attempts), std::to_string(r.successes),
                      fmt(r.measured_rate), r.ledger.balanced() ? "true" : "false"});
  }
  const json doc = {{"schema", "ionfab-sim-ensemble/1"},
                    {"horizon", a.horizon},
                    {"runs", arr},
                    {"summary",
                     {{"runs", total.runs},
                      {"attempts", total.attempts},
                      {"successes", total.successes},
                      {"mean_rate", total.mean_rate()},
                      {"collisions", total.collisions},
                      {"balanced", total.ledger.balanced()}}}};
  s << runs.size() << " replicates, mean rate " << fmt(total.mean_rate()) << " Hz (" << fmt(analytic)
    << " Hz per link analytic)\n";
  ctx.emit(ctx.common.format == "csv" ? t.str() : json_text(doc), s.str());
}

struct SchedArgs {
  std::string arch;
  std::string circuit;
  std::string map = "greedy";
  std::string pairs = "ideal";
  std::string timeline;
  bool strict = false;
};

void run_schedule(Context& ctx, const SchedArgs& a) {
  const ArchitectureSpec spec = ctx.arch(a.arch);
  const Circuit circuit = parse_circuit(ctx.load(a.circuit));
  QubitMap map;
  if (a.map == "greedy") {
    map = assign_qubits(circuit, spec, MapStrategy::kGreedyInteractionCut);
  } else if (a.map == "roundrobin" || a.map == "round_robin") {
    map = assign_qubits(circuit, spec, MapStrategy::kRoundRobin);
  } else {
    map = assign_qubits(circuit, spec, MapStrategy::kUser, qubit_map_from_json(spec, ctx.load_json(a.map)));
  }
  ScheduleOptions opts;
  opts.strict_proximity = a.strict;
  if (a.pairs == "buffered") {
    opts.supply = PairSupply::kBuffered;
    opts.seed = ctx.need_seed("--pairs buffered");
  } else if (a.pairs != "ideal") {
    throw UsageError("--pairs must be ideal or buffered");
  }
  const ScheduleResult r = schedule(circuit, map, spec, opts);
  if (!a.timeline.empty()) ctx.write(timeline_csv(spec, r), a.timeline);
  std::string data;
  if (ctx.common.format == "csv") {
    data = timeline_csv(spec, r);
  } else {
    json doc = to_json(spec, r);
    doc["map"] = to_json(spec, map)["map"];
    doc["crossings"] = crossing_count(circuit, map);
    doc["pair_supply"] = a.pairs;
    data = json_text(doc);
  }
  std::ostringstream s;
  s << circuit.ops.size() << " ops, makespan " << fmt(r.makespan) << " s, pairs " << r.pairs_consumed << ", swaps "
    << r.swaps_inserted << ", fidelity " << fmt(r.fidelity_estimate) << " (gates " << fmt(r.fidelity.gates)
    << ", idle " << fmt(r.fidelity.idle) << ")\n";
  ctx.emit(data, s.str());
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Resource estimation and simulation for modular trapped-ion machines", "ionfab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  std::string manifest_path;
  app.add_option("--manifest", manifest_path, "Write the run manifest to PATH (default: stderr)");

  Context ctx{out, err, {}, {}};
  Common& c = ctx.common;
  std::function<void()> action;

  // validate
  std::string arch_path;
  auto* validate = app.add_subcommand("validate", "Check an architecture file against every invariant");
  validate->add_option("arch", arch_path, "Architecture JSON")->required();
  add_common(validate, c, {"json"});
  validate->callback([&] { action = [&] { run_validate(ctx, arch_path); }; });

  // rates
  std::string elu;
  auto* rates_cmd = app.add_subcommand("rates", "Physical rates per ELU");
  rates_cmd->add_option("arch", arch_path, "Architecture JSON")->required();
  rates_cmd->add_option("--elu", elu, "Only this ELU");
  add_common(rates_cmd, c, {"json", "csv"});
  rates_cmd->callback([&] { action = [&] { run_rates(ctx, arch_path, elu); }; });

  // graph
  std::string tier = "all";
  bool profile = false;
  auto* graph = app.add_subcommand("graph", "Interaction graph of every ion");
  graph->add_option("arch", arch_path, "Architecture JSON")->required();
  graph->add_option("--tier", tier, "Edge tier")->check(CLI::IsMember({"fast", "collective", "all"}))->capture_default_str();
  graph->add_flag("--profile", profile, "Emit the hop-distance histogram instead of the graph");
  add_common(graph, c, {"json", "dot"});
  graph->callback([&] { action = [&] { run_graph(ctx, arch_path, tier, profile); }; });

  // ising
  IsingArgs ia;
  auto* ising = app.add_subcommand("ising", "Ising instances and exact solvers");
  ising->require_subcommand(1);
  auto* gen = ising->add_subcommand("generate", "Power-law chain or Boltzmann-machine topology");
  gen->add_option("--n", ia.n, "Spins of a power-law chain");
  gen->add_option("--alpha", ia.alpha, "Power-law exponent")->capture_default_str();
  gen->add_option("--j0", ia.j0, "Coupling scale (J < 0 is ferromagnetic)")->capture_default_str();
  gen->add_flag("--allow-any-alpha", ia.allow_any_alpha, "Accept alpha outside [0, 3]");
  gen->add_option("--layers", ia.layers, "Boltzmann layer sizes, comma separated")->delimiter(',');
  gen->add_flag("--full", ia.full, "Couple every pair of spins, not only adjacent layers");
  add_common(gen, c, {"json"});
  gen->callback([&] { action = [&] { run_ising_generate(ctx, ia); }; });

  auto* solve = ising->add_subcommand("solve", "Brute-force ground states");
  solve->add_option("instance", ia.instance, "Ising instance JSON")->required();
  solve->add_option("--cap", ia.cap, "Most ground configurations listed")->capture_default_str();
  add_common(solve, c, {"json"});
  solve->callback([&] { action = [&] { run_ising_solve(ctx, ia); }; });

  auto* adiabatic = ising->add_subcommand("adiabatic", "Statevector transverse-field sweep");
  adiabatic->add_option("instance", ia.instance, "Ising instance JSON")->required();
  adiabatic->add_option("--time", ia.time, "Total time in units of 1/|j0|")->capture_default_str();
  adiabatic->add_option("--steps", ia.steps, "Trotter steps")->capture_default_str();
  adiabatic->add_option("--trace-points", ia.trace_points, "Energy trace samples")->capture_default_str();
  add_common(adiabatic, c, {"json", "csv"});
  adiabatic->callback([&] { action = [&] { run_ising_adiabatic(ctx, ia); }; });

  auto* anneal = ising->add_subcommand("anneal", "Metropolis simulated annealing");
  anneal->add_option("instance", ia.instance, "Ising instance JSON")->required();
  anneal->add_option("--t-start", ia.anneal.t_start, "Initial temperature")->capture_default_str();
  anneal->add_option("--t-end", ia.anneal.t_end, "Final temperature")->capture_default_str();
  anneal->add_option("--temps", ia.anneal.n_temps, "Temperature steps")->capture_default_str();
  anneal->add_option("--sweeps", ia.anneal.sweeps_per_temp, "Sweeps per temperature")->capture_default_str();
  add_common(anneal, c, {"json"});
  anneal->callback([&] { action = [&] { run_ising_anneal(ctx, ia); }; });

  // qec
  QecArgs qa;
  auto* qec_cmd = app.add_subcommand("qec", "Code graphs and embeddings");
  qec_cmd->require_subcommand(1);
  auto* surface = qec_cmd->add_subcommand("surface", "Rotated surface-code patch");
  surface->add_option("--d", qa.d, "Odd distance")->required();
  add_common(surface, c, {"json"});
  surface->callback([&] { action = [&] { emit_code(ctx, qec::surface_code_graph(qa.d)); }; });

  auto* steane = qec_cmd->add_subcommand("steane", "Concatenated Steane code");
  steane->add_option("--levels", qa.levels, "Concatenation levels")->required();
  add_common(steane, c, {"json"});
  steane->callback([&] { action = [&] { emit_code(ctx, qec::steane_concat_graph(qa.levels)); }; });

  auto* hgp = qec_cmd->add_subcommand("hgp", "Hypergraph product of two check matrices");
  hgp->add_option("--h1", qa.h1, "First check matrix, 0/1 CSV");
  hgp->add_option("--h2", qa.h2, "Second check matrix, 0/1 CSV");
  hgp->add_option("--rep", qa.rep, "Use length-N repetition codes");
  hgp->add_option("--rep2", qa.rep2, "Length of the second repetition code (default: --rep)");
  add_common(hgp, c, {"json"});
  hgp->callback([&] { action = [&] { run_qec_hgp(ctx, qa); }; });

  auto* embed = qec_cmd->add_subcommand("embed", "Embed a code graph on a grid or a modular machine");
  embed->add_option("--code", qa.code, "Code graph JSON")->required();
  embed->add_option("--host", qa.host, "'grid' or an architecture JSON")->capture_default_str();
  embed->add_option("--placement", qa.placement, "Grid placement: row_major, random, native")->capture_default_str();
  embed->add_option("--partition", qa.partition, "Modular partition: greedy, round_robin, user")->capture_default_str();
  embed->add_option("--user-map", qa.user_map, "JSON array of ELU ids, one per node");
  add_common(embed, c, {"json"});
  embed->callback([&] { action = [&] { run_qec_embed(ctx, qa); }; });

  // simulate
  SimArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Photonic network simulation");
  simulate->add_option("arch", sa.arch, "Architecture JSON")->required();
  simulate->add_option("--schedule", sa.schedule, "Switch schedule JSON (default: one link per ELU pair)");
  simulate->add_option("--demand", sa.demand, "Pair request JSON");
  simulate->add_option("--horizon", sa.horizon, "Simulated time, s")->required();
  simulate->add_option("--log", sa.log, "Write the event log CSV to PATH");
  simulate->add_option("--replicates", sa.replicates, "Runs with seeds seed, seed+1, ...")->capture_default_str();
  simulate->add_option("--threads", sa.threads, "Worker threads (0: IONFAB_THREADS or all cores)")->capture_default_str();
  simulate->add_flag("--no-collisions", sa.no_collisions, "Disable background-gas collisions");
  simulate->add_option("--p", sa.p, "Override the per-attempt success probability");
  add_common(simulate, c, {"json", "csv"});
  simulate->callback([&] { action = [&] { run_simulate(ctx, sa); }; });

  // schedule
  SchedArgs sc;
  auto* sched = app.add_subcommand("schedule", "Map and schedule a circuit");
  sched->add_option("arch", sc.arch, "Architecture JSON")->required();
  sched->add_option("circuit", sc.circuit, "Circuit (.iqc)")->required();
  sched->add_option("--map", sc.map, "greedy, roundrobin, or a qubit map JSON")->capture_default_str();
  sched->add_option("--pairs", sc.pairs, "Pair supply: ideal or buffered")->capture_default_str();
  sched->add_option("--timeline", sc.timeline, "Write the timeline CSV to PATH");
  sched->add_flag("--strict", sc.strict, "Forbid collective gates; insert SWAPs");
  add_common(sched, c, {"json", "csv"});
  sched->callback([&] { action = [&] { run_schedule(ctx, sc); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    if (app.get_subcommands().empty()) err << app.help();
    return 2;
  }

  std::vector<std::string> path;
  for (const CLI::App* cur = &app; !cur->get_subcommands().empty();) {
    cur = cur->get_subcommands().back();
    path.push_back(cur->get_name());
  }
  for (const auto& p : path) ctx.manifest.subcommand += (ctx.manifest.subcommand.empty() ? "" : " ") + p;

  const auto t0 = std::chrono::steady_clock::now();
  int code = 0;
  try {
    if (!action) throw UsageError("no command given");
    action();
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    code = 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    code = 1;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const json manifest = {{"tool", "ionfab"},
                         {"version", kVersion},
                         {"subcommand", ctx.manifest.subcommand},
                         {"inputs", ctx.manifest.inputs},
                         {"seed", c.seed ? json(*c.seed) : json()},
                         {"wall_time_s", wall},
                         {"outputs", ctx.manifest.outputs},
                         {"exit_code", code}};
  try {
    if (!manifest_path.empty()) {
      emit_text(json_text(manifest), manifest_path, err);
    } else {
      err << "manifest: " << manifest.dump() << "\n";
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return code;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.push_back("ionfab");
  for (const auto& a : args) argv.push_back(a.c_str());
  return dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace ionfab::cli
