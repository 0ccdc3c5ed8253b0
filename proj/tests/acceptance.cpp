// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "ionfab/arch_graph.hpp"
#include "ionfab/ising_oracle.hpp"
#include "ionfab/netsim.hpp"
#include "ionfab/phys_rates.hpp"
#include "ionfab/qec_codes.hpp"
#include "ionfab/report.hpp"
#include "ionfab/rng.hpp"
#include "ionfab/scheduler.hpp"
#include "ionfab/units.hpp"
#include "oracles.hpp"
#include "scenarios.hpp"
#include "test_specs.hpp"

using namespace ionfab;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream note;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) note << "failed: ";
      else note << "; ";
      note << what;
      pass = false;
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// --- 1 ------------------------------------------------------------------

void connection_rate(Outcome& o) {
  const auto t0 = Clock::now();
  const double closed = rates::mean_connection_rate(5e5, 0.1, 0.2);
  o.require(std::fabs(closed - 100.0) <= 1e-12, "closed form " + format_number(closed));

  const auto spec = oracle::example_spec();
  o.require(spec.attempt_rate == 5e5 && spec.collection_fraction == 0.1 && spec.detector_efficiency == 0.2,
            "example machine parameters");
  const auto report = rates::rate_report(spec, "A");
  o.require(report.mean_connection_rate == closed, "rates report");

  std::vector<netsim::ScheduledConfig> sched{{0.0, netsim::auto_config(spec, {{0, 1}})}};
  netsim::SimOptions opts;
  opts.record_events = false;
  opts.record_occupancy = false;
  opts.collisions = false;
  const double horizon = 100.0;
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= 100; ++s) seeds.push_back(s);
  const auto runs = netsim::run_ensemble(spec, sched, {}, horizon, seeds, opts);
  const double p = rates::link_success_probability(0.1, 0.2);
  const double sigma = std::sqrt(spec.attempt_rate * p * (1 - p) / horizon);
  int inside = 0;
  for (const auto& r : runs) inside += std::fabs(r.measured_rate - closed) <= 3 * sigma;
  const double wall = seconds_since(t0);
  o.require(inside >= 95, std::to_string(inside) + "/100 seeds within 3 sigma");
  o.require(wall < 10.0, "runtime " + format_number(wall) + " s");
  o.note << (o.pass ? "" : "; ") << "rate " << format_number(closed) << " Hz, " << inside
         << "/100 seeds within 3 sigma (sigma " << format_number(sigma) << " Hz), " << format_number(wall) << " s";
}

// --- 2 ------------------------------------------------------------------

void scaling_laws(Outcome& o) {
  const auto sp = default_species("Yb171");
  const double k = 2.0 * units::kTwoPi / 355e-9;
  const double rabi = units::hz_to_angular(1e6);
  const double trap = units::hz_to_angular(3e6);
  const double w1 = rates::recoil_frequency(k, sp.mass, 1);
  const double ref = rates::gate_rate(rabi, w1, trap);
  double worst = 0.0;
  int inexact = 0;
  for (int n = 1; n <= 100; ++n) {
    const double wn = rates::recoil_frequency(k, sp.mass, n);
    inexact += wn != w1 / n;
    const double g = rates::gate_rate(rabi, wn, trap);
    worst = std::max(worst, std::fabs(g * std::sqrt(static_cast<double>(n)) - ref) / ref);
  }
  o.require(worst <= 1e-12, "gate_rate*sqrt(N) spread " + format_number(worst));
  o.require(inexact == 0, std::to_string(inexact) + " recoil values differ from omega_R(1)/N");
  o.note << (o.pass ? "" : "; ") << "max relative spread " << format_number(worst) << ", recoil 1/N exact for N=1..100";
}

// --- 3 ------------------------------------------------------------------

void gate_rate_band(Outcome& o) {
  const auto spec = oracle::example_spec();
  for (const auto& r : rates::rate_reports(spec)) {
    o.require(r.gate_rate >= 1e4 && r.gate_rate <= 1e5, r.elu + " R_gate/2pi " + format_number(r.gate_rate));
  }
  const double wr = rates::recoil_frequency(spec.drive.effective_wavevector, spec.species.mass, 1);
  const double err = oracle::rel_err(wr, oracle::recoil(oracle::kRaman355, oracle::kYb171Mass, 1));
  o.require(err <= 1e-9, "omega_R relative error " + format_number(err));
  o.note << (o.pass ? "" : "; ") << "R_gate/2pi " << format_number(rates::rate_report(spec, "A").gate_rate)
         << " Hz at N=" << spec.elus[0].n_ions << ", omega_R/2pi " << format_number(units::angular_to_hz(wr))
         << " Hz, oracle error " << format_number(err);
}

// --- 4 ------------------------------------------------------------------

void netsim_ledger(Outcome& o) {
  int checked = 0;
  std::uint64_t overflow = 0;
  for (const auto& sc : simcases::scenarios()) {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
      const auto a = netsim::run_sim(sc.spec, sc.schedule, sc.demand, sc.horizon, seed);
      const auto b = netsim::run_sim(sc.spec, sc.schedule, sc.demand, sc.horizon, seed);
      const auto& l = a.ledger;
      // Overflowed pairs never enter a buffer; the four bins account for
      // every stored pair.
      o.require(l.delivered + l.expired + l.invalidated + l.residual == l.successes - l.overflowed,
                sc.name + " ledger");
      o.require(l.successes == a.successes, sc.name + " success count");
      o.require(netsim::events_csv(a.events) == netsim::events_csv(b.events), sc.name + " log differs");
      o.require(json_text(netsim::to_json(a, true)) == json_text(netsim::to_json(b, true)), sc.name + " result differs");
      overflow += l.overflowed;
      ++checked;
    }
  }
  o.note << (o.pass ? "" : "; ") << checked << " scenario runs balanced and byte-identical (" << overflow
         << " tail drops booked separately)";
}

// --- 5 ------------------------------------------------------------------

void qec_locality(Outcome& o) {
  const auto t0 = Clock::now();
  std::vector<double> lx, ly;
  std::ostringstream spans;
  for (int n : {3, 5, 7, 9}) {
    const auto g = qec::hypergraph_product_graph(qec::repetition_code(n), qec::repetition_code(n));
    const auto grid = qec::embed_on_grid(g, qec::GridPlacement::kRowMajor);
    lx.push_back(std::log(static_cast<double>(g.n_data)));
    ly.push_back(std::log(static_cast<double>(grid.max_check_span)));
    spans << (n == 3 ? "" : " ") << g.n_data << ":" << grid.max_check_span;

    const int elus = (g.node_count() + 49) / 50;
    const auto spec = testspec::machine(elus, 50, {0, 49}, 4);
    const auto mod = qec::embed_on_modular(g, spec, qec::Partition::kGreedyCut);
    bool local = mod.max_intra_route_length == 1;
    for (const auto& c : mod.checks) local = local && c.span <= 1;
    o.require(local, "n=" + std::to_string(g.n_data) + " modular route length " +
                         std::to_string(mod.max_intra_route_length));
  }
  const std::vector<int> want{13, 41, 85, 145};
  for (std::size_t i = 0; i < 4; ++i)
    o.require(std::lround(std::exp(lx[i])) == want[i], "data count " + format_number(std::exp(lx[i])));
  double mx = 0, my = 0;
  for (int i = 0; i < 4; ++i) mx += lx[i] / 4, my += ly[i] / 4;
  double sxy = 0, sxx = 0;
  for (int i = 0; i < 4; ++i) sxy += (lx[i] - mx) * (ly[i] - my), sxx += (lx[i] - mx) * (lx[i] - mx);
  const double slope = sxy / sxx;
  const double wall = seconds_since(t0);
  o.require(std::fabs(slope - 0.5) <= 0.1, "slope " + format_number(slope));
  o.require(wall < 60.0, "runtime " + format_number(wall) + " s");
  o.note << (o.pass ? "" : "; ") << "grid span (n:span) " << spans.str() << ", log-log slope "
         << format_number(slope) << ", modular route length 1";
}

// --- 6 ------------------------------------------------------------------

void code_counts(Outcome& o) {
  for (int d : {3, 5, 7}) {
    const auto g = qec::surface_code_graph(d);
    o.require(g.n_data == d * d && static_cast<int>(g.checks.size()) == d * d - 1,
              "surface d=" + std::to_string(d));
  }
  for (int L : {1, 2}) {
    const auto g = qec::steane_concat_graph(L);
    o.require(g.n_data == (L == 1 ? 7 : 49), "steane L=" + std::to_string(L));
  }
  const auto h = qec::hypergraph_product_graph(qec::repetition_code(3), qec::repetition_code(3));
  o.require(h.n_data == 13 && h.checks.size() == 12u, "hgp counts");
  int pairs = 0, odd = 0;
  for (const auto& x : h.checks) {
    if (x.type != qec::CheckType::kX) continue;
    for (const auto& z : h.checks) {
      if (z.type != qec::CheckType::kZ) continue;
      int overlap = 0;
      for (int a : x.data)
        for (int b : z.data) overlap += a == b;
      odd += overlap % 2;
      ++pairs;
    }
  }
  o.require(odd == 0, std::to_string(odd) + " odd X/Z overlaps");
  o.note << (o.pass ? "" : "; ") << "surface (9,8) (25,24) (49,48), Steane 7 and 49, HGP 13/12 with " << pairs
         << " X/Z pairs all even";
}

// --- 7 ------------------------------------------------------------------

Circuit random_circuit(Rng& rng, int n_qubits, int n_ops) {
  Circuit c;
  c.n_qubits = n_qubits;
  const GateKind kinds[] = {GateKind::kX, GateKind::kH, GateKind::kCNOT, GateKind::kMS, GateKind::kMeasure};
  for (int k = 0; k < n_ops; ++k) {
    GateOp op;
    op.kind = kinds[rng.below(5)];
    const int a = static_cast<int>(rng.below(n_qubits));
    op.operands.push_back(a);
    if (is_two_qubit(op.kind)) {
      int b = static_cast<int>(rng.below(n_qubits - 1));
      op.operands.push_back(b >= a ? b + 1 : b);
    }
    c.ops.push_back(op);
  }
  return c;
}

void scheduler_oracle(Outcome& o) {
  std::ostringstream table;
  for (const char* name : {"three_ops.iqc", "ring4.iqc", "two_cliques.iqc", "interleaved.iqc", "global.iqc",
                           "star7.iqc", "ghz8.iqc"}) {
    const auto c = parse_circuit(read_file(oracle::fixture(name)));
    std::vector<std::pair<int, int>> two_q;
    std::vector<std::vector<int>> groups;
    std::size_t biggest = 0;
    for (const auto& op : c.ops) {
      if (is_two_qubit(op.kind)) two_q.push_back({op.operands[0], op.operands[1]});
      if (op.kind == GateKind::kGlobalMS) groups.push_back(op.operands), biggest = std::max(biggest, op.operands.size());
    }
    const int cap = std::max((c.n_qubits + 1) / 2, static_cast<int>(biggest));
    const auto spec = testspec::machine(2, cap + 2, {0, cap + 1}, 2);
    const auto best = brute_force_best_map(c, spec);
    const int greedy = crossing_count(c, assign_qubits(c, spec, MapStrategy::kGreedyInteractionCut));
    const int exact = oracle::min_cut(c.n_qubits, 2, {cap, cap}, two_q, groups);
    o.require(best.crossings == exact, std::string(name) + " brute force " + std::to_string(best.crossings) +
                                           " vs oracle " + std::to_string(exact));
    o.require(greedy >= best.crossings, std::string(name) + " greedy below optimum");
    table << (table.tellp() > 0 ? " " : "") << name << "=" << greedy << "/" << best.crossings;
  }

  Rng rng(2718);
  auto spec = testspec::machine(2, 6, {0, 5}, 2);
  int ordered = 0, exact_pairs = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto c = random_circuit(rng, 8, 20);
    const auto m = assign_qubits(c, spec, seed % 2 ? MapStrategy::kRoundRobin : MapStrategy::kGreedyInteractionCut);
    ScheduleOptions buffered;
    buffered.supply = PairSupply::kBuffered;
    buffered.seed = seed;
    const auto a = schedule(c, m, spec);
    const auto b = schedule(c, m, spec, buffered);
    ordered += a.makespan <= b.makespan;
    const auto crossings = static_cast<std::uint64_t>(crossing_count(c, m));
    std::uint64_t remote_entries = 0;
    for (const auto& e : b.timeline) remote_entries += e.remote;
    exact_pairs += a.pairs_consumed == crossings && b.pairs_consumed == crossings && remote_entries == crossings;
  }
  o.require(ordered == 100, std::to_string(ordered) + "/100 IDEAL <= BUFFERED");
  o.require(exact_pairs == 100, std::to_string(exact_pairs) + "/100 exact pair ledgers");
  o.note << (o.pass ? "" : "; ") << "greedy/optimal crossings " << table.str() << "; IDEAL <= BUFFERED " << ordered
         << "/100; pair ledger exact " << exact_pairs << "/100";
}

// --- 8 ------------------------------------------------------------------

void ising_oracle(Outcome& o) {
  const auto t0 = Clock::now();
  Rng rng(4242);
  int matched = 0;
  for (int trial = 0; trial < 50; ++trial) {
    IsingInstance inst(10);
    oracle::Dense d;
    d.n = 10;
    d.J.assign(10, std::vector<double>(10, 0.0));
    d.B.assign(10, 0.0);
    for (int i = 0; i < 10; ++i) {
      for (int j = i + 1; j < 10; ++j) {
        const double v = 2.0 * rng.uniform() - 1.0;
        inst.set_coupling(i, j, v);
        d.J[i][j] = d.J[j][i] = v;
      }
      d.B[i] = rng.uniform() - 0.5;
      inst.set_field(i, d.B[i]);
    }
    const auto g = ising::brute_force_ground_state(inst);
    const auto want = oracle::enumerate_ground(d, g.tolerance);
    matched += std::fabs(g.energy - want.energy) <= g.tolerance && g.indices == want.argmin;

    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const auto r = ising::anneal_classical(inst, {}, seed + 10 * trial);
      o.require(r.energy >= g.energy - g.tolerance, "anneal beat brute force");
    }
  }
  o.require(matched == 50, std::to_string(matched) + "/50 enumerations match");

  const auto ferro = power_law_couplings(6, 0.0, -1.0);
  const auto pinned = ising::adiabatic_evolve(ferro, 50.0, 5000);
  o.require(pinned.overlap > 0.99, "overlap " + format_number(pinned.overlap));
  o.require(pinned.max_norm_error <= 1e-9, "norm error " + format_number(pinned.max_norm_error));
  double prev = 0.0;
  std::ostringstream trend;
  for (double T = 1.0; T <= 64.0; T *= 2) {
    const auto run = ising::adiabatic_evolve(ferro, T, static_cast<int>(100 * T));
    o.require(run.overlap >= prev - 1e-3, "overlap fell at T=" + format_number(T));
    trend << (T == 1.0 ? "" : " ") << format_number(std::round(run.overlap * 1e4) / 1e4);
    prev = run.overlap;
  }
  const double wall = seconds_since(t0);
  o.require(wall < 120.0, "runtime " + format_number(wall) + " s");
  o.note << (o.pass ? "" : "; ") << matched << "/50 enumerations match, overlap(50, 5000) "
         << format_number(pinned.overlap) << ", doublings " << trend.str() << ", anneal never below optimum";
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<void(Outcome&)>> criteria[] = {
      {"connection rate", connection_rate}, {"scaling laws", scaling_laws},
      {"gate rate band", gate_rate_band},   {"netsim ledger and determinism", netsim_ledger},
      {"qec locality", qec_locality},       {"code family counts", code_counts},
      {"scheduler oracle", scheduler_oracle}, {"ising oracle", ising_oracle},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Outcome o;
    try {
      check(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", index, name, o.note.str().c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
