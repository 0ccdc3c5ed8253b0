#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "golden.hpp"
#include "ionfab/errors.hpp"
#include "ionfab/phys_rates.hpp"
#include "ionfab/report.hpp"
#include "ionfab/rng.hpp"
#include "ionfab/scheduler.hpp"
#include "oracles.hpp"
#include "test_specs.hpp"

using namespace ionfab;

namespace {

Circuit fixture_circuit(const std::string& name) { return parse_circuit(slurp(oracle::fixture(name))); }

// Two or three ELUs just big enough for the circuit, two comm ions each.
ArchitectureSpec fitted_machine(const Circuit& c, int n_elus, int min_cap = 0) {
  int cap = (c.n_qubits + n_elus - 1) / n_elus;
  cap = std::max(cap, min_cap);
  return testspec::machine(n_elus, cap + 2, {0, cap + 1}, 2);
}

std::vector<std::pair<int, int>> two_qubit_pairs(const Circuit& c) {
  std::vector<std::pair<int, int>> out;
  for (const auto& op : c.ops)
    if (is_two_qubit(op.kind)) out.push_back({op.operands[0], op.operands[1]});
  return out;
}

std::vector<std::vector<int>> global_groups(const Circuit& c) {
  std::vector<std::vector<int>> out;
  for (const auto& op : c.ops)
    if (op.kind == GateKind::kGlobalMS) out.push_back(op.operands);
  return out;
}

int largest_group(const Circuit& c) {
  std::size_t m = 0;
  for (const auto& g : global_groups(c)) m = std::max(m, g.size());
  return static_cast<int>(m);
}

Circuit random_circuit(Rng& rng, int n_qubits, int n_ops) {
  Circuit c;
  c.n_qubits = n_qubits;
  const GateKind kinds[] = {GateKind::kX, GateKind::kH, GateKind::kRZ, GateKind::kCNOT, GateKind::kMS,
                            GateKind::kMeasure};
  for (int k = 0; k < n_ops; ++k) {
    GateOp op;
    op.kind = kinds[rng.below(6)];
    const int a = static_cast<int>(rng.below(n_qubits));
    op.operands.push_back(a);
    if (is_two_qubit(op.kind)) {
      int b = static_cast<int>(rng.below(n_qubits - 1));
      if (b >= a) ++b;
      op.operands.push_back(b);
    }
    if (op.kind == GateKind::kRZ) op.angle = 0.5;
    c.ops.push_back(op);
  }
  return c;
}

QubitMap place(const std::vector<PhysicalQubit>& slots) { return QubitMap{slots}; }

double end_of(const TimelineEntry& e) { return e.start + e.duration; }

// start + (end - start) can land one ulp past end.
bool not_after(double x, double y) { return x <= y + 1e-12 * std::max(1.0, std::fabs(y)); }

}  // namespace

// --- assignment ------------------------------------------------------------

TEST(Assign, RingOnTwoByTwo) {
  auto c = fixture_circuit("ring4.iqc");
  auto spec = testspec::machine(2, 4, {0, 3}, 1);
  auto greedy = assign_qubits(c, spec, MapStrategy::kGreedyInteractionCut);
  validate_map(greedy, c, spec);
  EXPECT_EQ(crossing_count(c, greedy), 2);
  EXPECT_EQ(brute_force_best_map(c, spec).crossings, 2);
  EXPECT_EQ(oracle::min_cut(4, 2, {2, 2}, two_qubit_pairs(c)), 2);
}

TEST(Assign, FitsInOneElu) {
  auto c = fixture_circuit("ghz8.iqc");
  auto spec = testspec::machine(2, 20, {0, 19}, 4);
  EXPECT_EQ(crossing_count(c, assign_qubits(c, spec, MapStrategy::kGreedyInteractionCut)), 0);
  EXPECT_EQ(brute_force_best_map(c, spec).crossings, 0);
}

TEST(Assign, GreedyAgainstBruteForceOnFixtures) {
  for (const char* name : {"ring4.iqc", "two_cliques.iqc", "interleaved.iqc", "ghz8.iqc", "global.iqc",
                           "star7.iqc", "three_ops.iqc"}) {
    auto c = fixture_circuit(name);
    for (int ne : {2, 3}) {
      auto spec = fitted_machine(c, ne, largest_group(c));
      const auto best = brute_force_best_map(c, spec);
      validate_map(best.map, c, spec);
      EXPECT_EQ(crossing_count(c, best.map), best.crossings) << name;
      std::vector<int> cap(static_cast<std::size_t>(ne), spec.elus[0].memory_ion_count());
      EXPECT_EQ(best.crossings, oracle::min_cut(c.n_qubits, ne, cap, two_qubit_pairs(c), global_groups(c)))
          << name << " on " << ne;
      auto greedy = assign_qubits(c, spec, MapStrategy::kGreedyInteractionCut);
      validate_map(greedy, c, spec);
      EXPECT_GE(crossing_count(c, greedy), best.crossings) << name;
    }
  }
}

TEST(Assign, GreedyFindsKnownCuts) {
  auto spec = testspec::machine(2, 5, {0, 4}, 1);
  auto cliques = fixture_circuit("two_cliques.iqc");
  EXPECT_EQ(crossing_count(cliques, assign_qubits(cliques, spec, MapStrategy::kGreedyInteractionCut)), 1);
  auto inter = fixture_circuit("interleaved.iqc");
  const int rr = crossing_count(inter, assign_qubits(inter, spec, MapStrategy::kRoundRobin));
  const int gr = crossing_count(inter, assign_qubits(inter, spec, MapStrategy::kGreedyInteractionCut));
  EXPECT_LE(gr, rr);
  EXPECT_EQ(gr, brute_force_best_map(inter, spec).crossings);
}

TEST(Assign, GreedyNeverWorseThanRoundRobin) {
  Rng rng(5);
  auto spec = testspec::machine(2, 5, {0, 4}, 1);
  for (int trial = 0; trial < 100; ++trial) {
    auto c = random_circuit(rng, 6, 12);
    const int rr = crossing_count(c, assign_qubits(c, spec, MapStrategy::kRoundRobin));
    const int gr = crossing_count(c, assign_qubits(c, spec, MapStrategy::kGreedyInteractionCut));
    EXPECT_LE(gr, rr) << to_text(c);
  }
}

TEST(Assign, GlobalGroupsStayTogether) {
  auto c = fixture_circuit("global.iqc");
  auto spec = fitted_machine(c, 2, 3);
  for (auto s : {MapStrategy::kRoundRobin, MapStrategy::kGreedyInteractionCut}) {
    auto m = assign_qubits(c, spec, s);
    EXPECT_EQ(m.slots[0].elu, m.slots[1].elu);
    EXPECT_EQ(m.slots[0].elu, m.slots[2].elu);
  }
  EXPECT_THROW(assign_qubits(c, testspec::machine(3, 4, {0, 3}, 1), MapStrategy::kGreedyInteractionCut),
               ValidationError);
}

TEST(Assign, Errors) {
  auto c = fixture_circuit("ring4.iqc");
  auto small = testspec::machine(1, 4, {0}, 1);
  try {
    assign_qubits(c, small, MapStrategy::kRoundRobin);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("circuit needs 4 qubits"), std::string::npos);
  }
  auto spec = testspec::machine(2, 4, {0, 3}, 1);
  auto dup = place({{0, 1}, {0, 2}, {1, 1}, {1, 1}});
  EXPECT_THROW(assign_qubits(c, spec, MapStrategy::kUser, dup), ValidationError);
  EXPECT_THROW(validate_map(place({{0, 0}, {0, 2}, {1, 1}, {1, 2}}), c, spec), ValidationError);
  EXPECT_THROW(validate_map(place({{0, 1}, {0, 2}, {1, 1}, {1, 7}}), c, spec), ValidationError);
  EXPECT_THROW(validate_map(place({{0, 1}, {0, 2}, {1, 1}}), c, spec), ValidationError);
  EXPECT_THROW(validate_map(place({{0, 1}, {0, 2}, {1, 1}, {4, 1}}), c, spec), ValidationError);
  Rng rng(1);
  auto big = random_circuit(rng, 9, 4);
  EXPECT_THROW(brute_force_best_map(big, testspec::machine(2, 20, {0}, 1)), DomainError);
  EXPECT_THROW(brute_force_best_map(c, testspec::machine(4, 4, {0}, 1)), DomainError);
}

TEST(Assign, UserMapJson) {
  auto spec = testspec::machine(2, 4, {0, 3}, 1);
  auto m = qubit_map_from_json(spec, nlohmann::json::parse(R"({"map": [["A", 1], ["B", 2]]})"));
  EXPECT_EQ(m, place({{0, 1}, {1, 2}}));
  EXPECT_EQ(qubit_map_from_json(spec, to_json(spec, m)), m);
  EXPECT_THROW(qubit_map_from_json(spec, nlohmann::json::parse(R"({"map": [["Z", 1]]})")), SchemaError);
  EXPECT_THROW(qubit_map_from_json(spec, nlohmann::json::parse(R"({"map": [["A"]]})")), SchemaError);
  EXPECT_THROW(qubit_map_from_json(spec, nlohmann::json::parse(R"({"slots": []})")), SchemaError);
}

// --- durations -------------------------------------------------------------

TEST(Schedule, AdjacentCnotIsOneFastGate) {
  auto spec = testspec::two_by_twenty();
  auto c = parse_circuit("qubits 2\nCNOT q0 q1");
  auto r = schedule(c, place({{0, 5}, {0, 6}}), spec);
  EXPECT_EQ(r.makespan, rates::fast_gate_time(spec, spec.elus[0]));
  EXPECT_EQ(r.pairs_consumed, 0u);
  EXPECT_EQ(r.timeline.at(0).resource, "fast");
  auto far = schedule(c, place({{0, 2}, {0, 17}}), spec);
  EXPECT_EQ(far.makespan, rates::slow_gate_time(spec, spec.elus[0]));
  EXPECT_EQ(far.timeline.at(0).resource, "slow");
}

TEST(Schedule, RemoteCnotIdeal) {
  auto spec = testspec::two_by_twenty();
  auto c = parse_circuit("qubits 2\nCNOT q0 q1");
  auto r = schedule(c, place({{0, 5}, {1, 5}}), spec);
  const double want = rates::teleport_overhead_time(spec, spec.elus[0], spec.elus[1]) + spec.classical_latency +
                      spec.elus[1].single_qubit_gate_time;
  EXPECT_EQ(r.makespan, want);
  EXPECT_EQ(r.pairs_consumed, 1u);
  EXPECT_EQ(r.remote_ops, 1u);
  EXPECT_EQ(r.pair_wait_total, 0.0);
  EXPECT_EQ(r.timeline.at(0).resource, "remote:A~B");
  EXPECT_EQ(r.timeline.at(0).elus, (std::vector<int>{0, 1}));
}

TEST(Schedule, OtherDurations) {
  auto spec = testspec::two_by_twenty();
  spec.measurement_isolation = false;
  auto c = parse_circuit("qubits 3\nX q0\nMEASURE q1\nGLOBAL_MS q0 q1 q2");
  auto r = schedule(c, place({{0, 2}, {0, 3}, {0, 4}}), spec);
  ASSERT_EQ(r.timeline.size(), 3u);
  EXPECT_EQ(r.timeline[0].duration, 1e-5);
  EXPECT_EQ(r.timeline[1].duration, spec.species.detection_time);
  EXPECT_EQ(r.timeline[2].duration, rates::slow_gate_time(spec, spec.elus[0]));
  EXPECT_EQ(r.timeline[2].start, spec.species.detection_time);
}

// 100 independent remote CNOTs over one 100 Hz link: the makespan is the
// time of the 100th heralded pair, a negative binomial in attempts.
TEST(Schedule, BufferedMatchesNegativeBinomial) {
  auto spec = testspec::machine(2, 102, {0, 101}, 4);
  Circuit c;
  c.n_qubits = 200;
  QubitMap m;
  for (int i = 0; i < 100; ++i) m.slots.push_back({0, i + 1});
  for (int i = 0; i < 100; ++i) m.slots.push_back({1, i + 1});
  for (int i = 0; i < 100; ++i) c.ops.push_back({GateKind::kCNOT, {i, 100 + i}, std::nullopt, 0});
  const double p = rates::link_success_probability(0.1, 0.2);
  const auto nb = oracle::neg_binomial_wait(100, spec.attempt_rate, p);
  const double tail = rates::teleport_overhead_time(spec, spec.elus[0], spec.elus[1]) + spec.classical_latency +
                      spec.elus[1].single_qubit_gate_time;
  EXPECT_NEAR(static_cast<double>(nb.mean), 1.0, 1e-9);

  const int runs = 20;
  double sum = 0.0;
  for (int s = 0; s < runs; ++s) {
    ScheduleOptions o;
    o.supply = PairSupply::kBuffered;
    o.seed = 1000 + s;
    auto r = schedule(c, m, spec, o);
    EXPECT_EQ(r.pairs_consumed, 100u);
    const double t = r.makespan - tail;
    EXPECT_LT(std::fabs(t - nb.mean), 5 * nb.sd) << s;
    sum += t;
  }
  EXPECT_LT(std::fabs(sum / runs - nb.mean), 3 * nb.sd / std::sqrt(runs));
  EXPECT_EQ(schedule(c, m, spec).makespan, tail);
}

TEST(Schedule, BufferedStallsWithoutLink) {
  auto spec = testspec::two_by_twenty();
  spec.attempt_rate = 1e-3;
  ScheduleOptions o;
  o.supply = PairSupply::kBuffered;
  o.max_time = 1.0;
  auto c = parse_circuit("qubits 2\nCNOT q0 q1");
  EXPECT_THROW(schedule(c, place({{0, 5}, {1, 5}}), spec, o), ValidationError);
}

// --- properties over random scenarios -------------------------------------

TEST(Schedule, InvariantsOverRandomScenarios) {
  Rng rng(99);
  auto spec = testspec::machine(2, 6, {0, 5}, 2);
  spec.elus[0].shuttle_cost_time = 3e-4;
  for (int trial = 0; trial < 100; ++trial) {
    auto c = random_circuit(rng, 8, 25);
    auto m = assign_qubits(c, spec, trial % 2 ? MapStrategy::kRoundRobin : MapStrategy::kGreedyInteractionCut);
    ScheduleOptions o;
    o.supply = PairSupply::kBuffered;
    o.seed = static_cast<std::uint64_t>(trial);
    auto ideal = schedule(c, m, spec);
    auto buf = schedule(c, m, spec, o);
    EXPECT_LE(ideal.makespan, buf.makespan) << trial;

    const auto crossings = static_cast<std::uint64_t>(crossing_count(c, m));
    for (const auto* r : {&ideal, &buf}) {
      EXPECT_EQ(r->pairs_consumed, crossings);
      EXPECT_EQ(r->remote_ops, crossings);
      ASSERT_EQ(r->timeline.size(), c.ops.size());
      double waits = 0.0;
      for (const auto& e : r->timeline) waits += e.pair_wait;
      EXPECT_DOUBLE_EQ(r->pair_wait_total, waits);

      // One op per ion at a time.
      for (std::size_t i = 0; i < r->timeline.size(); ++i) {
        for (std::size_t j = i + 1; j < r->timeline.size(); ++j) {
          const auto& a = r->timeline[i];
          const auto& b = r->timeline[j];
          bool shared = false;
          for (const auto& x : a.ions)
            for (const auto& y : b.ions) shared = shared || x == y;
          if (shared) EXPECT_TRUE(not_after(end_of(a), b.start) || not_after(end_of(b), a.start)) << trial;
        }
      }
      // Program order per qubit.
      std::vector<const TimelineEntry*> by_source(c.ops.size());
      for (const auto& e : r->timeline) by_source[static_cast<std::size_t>(e.source)] = &e;
      std::vector<double> last_end(static_cast<std::size_t>(c.n_qubits), 0.0);
      for (const auto* e : by_source) {
        for (int q : e->op.operands) {
          EXPECT_TRUE(not_after(last_end[static_cast<std::size_t>(q)], e->start));
          last_end[static_cast<std::size_t>(q)] = end_of(*e);
        }
      }
      for (std::size_t k = 1; k < r->timeline.size(); ++k)
        EXPECT_LE(r->timeline[k - 1].start, r->timeline[k].start);
      for (double t : r->idle_time) EXPECT_GE(t, 0.0);
      EXPECT_GT(r->fidelity_estimate, 0.0);
      EXPECT_LE(r->fidelity_estimate, 1.0);
    }
    EXPECT_LE(buf.fidelity_estimate, ideal.fidelity_estimate * (1 + 1e-12));
  }
}

TEST(Schedule, DeterministicPerSeed) {
  Rng rng(4);
  auto spec = testspec::machine(2, 6, {0, 5}, 2);
  auto c = random_circuit(rng, 8, 40);
  auto m = assign_qubits(c, spec, MapStrategy::kRoundRobin);
  ScheduleOptions o;
  o.supply = PairSupply::kBuffered;
  o.seed = 7;
  EXPECT_EQ(timeline_csv(spec, schedule(c, m, spec, o)), timeline_csv(spec, schedule(c, m, spec, o)));
  EXPECT_EQ(json_text(to_json(spec, schedule(c, m, spec, o))), json_text(to_json(spec, schedule(c, m, spec, o))));
}

// --- fidelity ---------------------------------------------------------------

TEST(Fidelity, EmptyCircuitIsOne) {
  Circuit c;
  c.n_qubits = 3;
  auto spec = testspec::two_by_twenty();
  auto r = schedule(c, assign_qubits(c, spec, MapStrategy::kRoundRobin), spec);
  EXPECT_EQ(r.fidelity_estimate, 1.0);
  EXPECT_EQ(r.makespan, 0.0);
}

TEST(Fidelity, TenGatesNoIdle) {
  auto spec = testspec::two_by_twenty();
  std::string text = "qubits 2\n";
  for (int i = 0; i < 10; ++i) text += "CNOT q0 q1\n";
  auto r = schedule(parse_circuit(text), place({{0, 5}, {0, 6}}), spec);
  EXPECT_DOUBLE_EQ(r.fidelity.gates, std::pow(0.999, 10));
  EXPECT_EQ(r.fidelity.idle, 1.0);
  EXPECT_DOUBLE_EQ(r.fidelity_estimate, std::pow(0.999, 10));
}

TEST(Fidelity, IdleOfOneCoherenceTime) {
  auto spec = testspec::two_by_twenty();
  ScheduleResult r;
  r.idle_time = {spec.species.qubit_coherence_time};
  auto f = fidelity_estimate(r, spec);
  EXPECT_DOUBLE_EQ(f.idle, std::exp(-1.0));
  EXPECT_DOUBLE_EQ(f.total, std::exp(-1.0));
  r.idle_time = {0.25 * spec.species.qubit_coherence_time, 0.75 * spec.species.qubit_coherence_time};
  EXPECT_DOUBLE_EQ(fidelity_estimate(r, spec).idle, std::exp(-1.0));
}

TEST(Fidelity, IdleAccounting) {
  auto spec = testspec::two_by_twenty();
  // q1 waits for q0's X before the CNOT; q2 starts late and ends early.
  auto c = parse_circuit("qubits 3\nX q0\nCNOT q0 q1\nX q2\nX q0");
  auto r = schedule(c, place({{0, 2}, {0, 3}, {0, 10}}), spec);
  const double fast = rates::fast_gate_time(spec, spec.elus[0]);
  EXPECT_DOUBLE_EQ(r.makespan, 2e-5 + fast);
  EXPECT_DOUBLE_EQ(r.idle_time[0], 0.0);
  EXPECT_DOUBLE_EQ(r.idle_time[1], 1e-5);
  EXPECT_DOUBLE_EQ(r.idle_time[2], fast + 1e-5);
}

// An appended gate can turn idle time into busy time, so the product only
// falls when every gate costs more than its own duration of decoherence.
TEST(Fidelity, MoreGatesNeverHelp) {
  Rng rng(21);
  auto spec = testspec::machine(2, 6, {0, 5}, 2);
  spec.single_qubit_gate_fidelity = 0.9999;
  spec.measurement_fidelity = 0.99;
  for (int trial = 0; trial < 50; ++trial) {
    auto c = random_circuit(rng, 8, 15);
    auto m = assign_qubits(c, spec, MapStrategy::kGreedyInteractionCut);
    const double base = schedule(c, m, spec).fidelity_estimate;
    auto longer = c;
    longer.ops.push_back(random_circuit(rng, 8, 1).ops[0]);
    EXPECT_LE(schedule(longer, m, spec).fidelity_estimate, base) << trial;
  }
}

TEST(Fidelity, MoreIdleNeverHelps) {
  auto spec = testspec::two_by_twenty();
  ScheduleResult r;
  r.idle_time = {0.0, 1.0};
  double prev = fidelity_estimate(r, spec).total;
  for (int k = 1; k < 20; ++k) {
    r.idle_time[static_cast<std::size_t>(k % 2)] += 0.5 * k;
    const double f = fidelity_estimate(r, spec).total;
    EXPECT_LT(f, prev);
    prev = f;
  }
}

// --- strict proximity, isolation, validation ------------------------------

TEST(Strict, SwapsBringOperandsClose) {
  auto spec = testspec::machine(1, 20, {0, 19}, 4);
  auto c = parse_circuit("qubits 3\nCNOT q0 q1\nX q2");
  auto m = place({{0, 1}, {0, 18}, {0, 5}});
  auto loose = schedule(c, m, spec);
  EXPECT_EQ(loose.swaps_inserted, 0);
  EXPECT_EQ(loose.timeline[0].resource, "slow");

  ScheduleOptions o;
  o.strict_proximity = true;
  auto r = schedule(c, m, spec, o);
  EXPECT_EQ(r.swaps_inserted, 4);  // 1 -> 5 -> 9 -> 13 -> 17
  EXPECT_EQ(r.final_map.slots[0], (PhysicalQubit{0, 17}));
  EXPECT_EQ(r.final_map.slots[2], (PhysicalQubit{0, 1}));  // displaced by the first SWAP
  const double fast = rates::fast_gate_time(spec, spec.elus[0]);
  for (const auto& e : r.timeline) {
    EXPECT_NE(e.resource, "slow");
    if (e.op.kind == GateKind::kSwap) {
      EXPECT_DOUBLE_EQ(e.duration, 3 * fast);
      EXPECT_DOUBLE_EQ(e.fidelity, std::pow(0.999, 3));
      EXPECT_EQ(e.source, -1);
    }
  }
  EXPECT_GT(r.makespan, loose.makespan - rates::slow_gate_time(spec, spec.elus[0]));
}

TEST(Isolation, MeasurementChargedWhenNeighboursContinue) {
  auto spec = testspec::two_by_twenty();
  spec.elus[0].shuttle_cost_time = 2e-4;
  auto m = place({{0, 2}, {0, 3}});
  auto before = schedule(parse_circuit("qubits 2\nMEASURE q0\nX q1"), m, spec);
  EXPECT_TRUE(before.timeline[0].isolation_charged);
  EXPECT_DOUBLE_EQ(before.timeline[0].duration, spec.species.detection_time + 2e-4);
  auto after = schedule(parse_circuit("qubits 2\nX q1\nMEASURE q0"), m, spec);
  EXPECT_FALSE(after.timeline[1].isolation_charged);
  auto other_elu = schedule(parse_circuit("qubits 2\nMEASURE q0\nX q1"), place({{0, 2}, {1, 3}}), spec);
  EXPECT_FALSE(other_elu.timeline[0].isolation_charged);
  spec.measurement_isolation = false;
  auto off = schedule(parse_circuit("qubits 2\nMEASURE q0\nX q1"), m, spec);
  EXPECT_FALSE(off.timeline[0].isolation_charged);
  EXPECT_EQ(off.timeline[0].duration, spec.species.detection_time);
}

TEST(Validation, GlobalMsAcrossElus) {
  auto spec = testspec::two_by_twenty();
  auto c = parse_circuit("qubits 2\nGLOBAL_MS q0 q1");
  EXPECT_THROW(schedule(c, place({{0, 2}, {1, 2}}), spec), ValidationError);
  EXPECT_NO_THROW(schedule(c, place({{0, 2}, {0, 9}}), spec));
}

TEST(Export, CsvAndJson) {
  auto spec = testspec::two_by_twenty();
  auto c = fixture_circuit("three_ops.iqc");
  auto r = schedule(c, place({{0, 2}, {1, 2}}), spec);
  auto csv = timeline_csv(spec, r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "start_s,dur_s,gate,operands,elus,resource");
  EXPECT_NE(csv.find("CNOT,q0 q1,A B,remote:A~B"), std::string::npos);
  auto j = to_json(spec, r);
  EXPECT_EQ(j["schema"], "ionfab-schedule/1");
  EXPECT_EQ(j["timeline"].size(), 3u);
  EXPECT_EQ(j["final_map"][1], nlohmann::json::parse(R"(["B", 2])"));
  EXPECT_TRUE(j["timeline"][1].contains("pair_wait"));
}
