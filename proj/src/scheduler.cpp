#include "ionfab/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>

#include "ionfab/errors.hpp"
#include "ionfab/netsim.hpp"
#include "ionfab/phys_rates.hpp"
#include "ionfab/report.hpp"

namespace ionfab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Qubits joined by a GLOBAL_MS must share an ELU; they form one unit.
struct Units {
  std::vector<int> unit_of;              // per qubit
  std::vector<std::vector<int>> members;  // per unit, ascending
};

Units build_units(const Circuit& c) {
  std::vector<int> parent(static_cast<std::size_t>(c.n_qubits));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (const auto& op : c.ops) {
    if (op.kind != GateKind::kGlobalMS) continue;
    for (std::size_t i = 1; i < op.operands.size(); ++i) {
      const int a = find(op.operands[0]);
      const int b = find(op.operands[i]);
      if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
  }
  Units u;
  u.unit_of.assign(static_cast<std::size_t>(c.n_qubits), -1);
  std::map<int, int> root_to_unit;
  for (int q = 0; q < c.n_qubits; ++q) {
    const int r = find(q);
    auto [it, fresh] = root_to_unit.emplace(r, static_cast<int>(u.members.size()));
    if (fresh) u.members.emplace_back();
    u.unit_of[static_cast<std::size_t>(q)] = it->second;
    u.members[static_cast<std::size_t>(it->second)].push_back(q);
  }
  return u;
}

std::vector<int> capacities(const ArchitectureSpec& spec) {
  std::vector<int> cap;
  for (const auto& e : spec.elus) cap.push_back(e.memory_ion_count());
  return cap;
}

void require_fits(const Circuit& c, const ArchitectureSpec& spec) {
  if (c.n_qubits > spec.total_memory_ions()) {
    throw ValidationError("circuit needs " + std::to_string(c.n_qubits) + " qubits; machine has " +
                          std::to_string(spec.total_memory_ions()) + " memory ions");
  }
}

// Memory positions handed out in ascending qubit order within each ELU.
QubitMap map_from_elus(const std::vector<int>& elu_of_qubit, const ArchitectureSpec& spec) {
  std::vector<std::vector<int>> free_pos;
  for (const auto& e : spec.elus) free_pos.push_back(e.memory_positions());
  std::vector<std::size_t> used(spec.elus.size(), 0);
  QubitMap m;
  for (int e : elu_of_qubit) {
    const auto ue = static_cast<std::size_t>(e);
    if (used[ue] >= free_pos[ue].size()) throw ValidationError("ELU " + spec.elus[ue].id + " over capacity");
    m.slots.push_back({e, free_pos[ue][used[ue]++]});
  }
  return m;
}

// Partition state over units with incremental connection weights.
class Partitioner {
 public:
  Partitioner(const Units& units, const std::vector<std::vector<long>>& w, std::vector<int> cap)
      : units_(units), w_(w), cap_(std::move(cap)) {}

  std::size_t unit_size(int u) const { return units_.members[static_cast<std::size_t>(u)].size(); }

  void reset() {
    const std::size_t nu = units_.members.size();
    elu_.assign(nu, -1);
    room_ = std::vector<long>(cap_.begin(), cap_.end());
    conn_.assign(nu, std::vector<long>(cap_.size(), 0));
  }

  bool fits(int u, int e) const { return room_[static_cast<std::size_t>(e)] >= static_cast<long>(unit_size(u)); }

  void place(int u, int e) {
    elu_[static_cast<std::size_t>(u)] = e;
    room_[static_cast<std::size_t>(e)] -= static_cast<long>(unit_size(u));
    for (std::size_t x = 0; x < elu_.size(); ++x) conn_[x][static_cast<std::size_t>(e)] += w_[x][static_cast<std::size_t>(u)];
  }

  void unplace(int u) {
    const int e = elu_[static_cast<std::size_t>(u)];
    room_[static_cast<std::size_t>(e)] += static_cast<long>(unit_size(u));
    for (std::size_t x = 0; x < elu_.size(); ++x) conn_[x][static_cast<std::size_t>(e)] -= w_[x][static_cast<std::size_t>(u)];
    elu_[static_cast<std::size_t>(u)] = -1;
  }

  long conn(int u, int e) const { return conn_[static_cast<std::size_t>(u)][static_cast<std::size_t>(e)]; }
  int elu(int u) const { return elu_[static_cast<std::size_t>(u)]; }
  const std::vector<int>& assignment() const { return elu_; }

  // Greedy growth: heaviest units first, each to the ELU it talks to most.
  bool construct() {
    reset();
    const int nu = static_cast<int>(units_.members.size());
    std::vector<long> degree(static_cast<std::size_t>(nu), 0);
    for (int u = 0; u < nu; ++u) {
      for (int v = 0; v < nu; ++v) degree[static_cast<std::size_t>(u)] += w_[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)];
    }
    std::vector<int> order(static_cast<std::size_t>(nu));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      if (unit_size(a) != unit_size(b)) return unit_size(a) > unit_size(b);
      return degree[static_cast<std::size_t>(a)] > degree[static_cast<std::size_t>(b)];
    });
    for (int u : order) {
      int best = -1;
      for (int e = 0; e < static_cast<int>(cap_.size()); ++e) {
        if (!fits(u, e)) continue;
        if (best < 0 || conn(u, e) > conn(u, best)) best = e;
      }
      if (best < 0) return false;
      place(u, best);
    }
    return true;
  }

  bool round_robin() {
    reset();
    const int ne = static_cast<int>(cap_.size());
    int next = 0;
    for (int u = 0; u < static_cast<int>(units_.members.size()); ++u) {
      int e = -1;
      for (int k = 0; k < ne; ++k) {
        const int cand = (next + k) % ne;
        if (fits(u, cand)) {
          e = cand;
          break;
        }
      }
      if (e < 0) return false;
      place(u, e);
      next = (e + 1) % ne;
    }
    return true;
  }

  // Kernighan-Lin style: single moves, then pairwise exchanges, while the
  // cut strictly drops.
  void refine() {
    const int nu = static_cast<int>(units_.members.size());
    const int ne = static_cast<int>(cap_.size());
    for (int pass = 0; pass < 200; ++pass) {
      bool improved = false;
      for (int u = 0; u < nu; ++u) {
        const int cur = elu(u);
        int best = cur;
        long best_gain = 0;
        for (int e = 0; e < ne; ++e) {
          if (e == cur || !fits(u, e)) continue;
          const long gain = conn(u, e) - conn(u, cur);
          if (gain > best_gain) {
            best_gain = gain;
            best = e;
          }
        }
        if (best != cur) {
          unplace(u);
          place(u, best);
          improved = true;
        }
      }
      if (nu <= 512) {
        for (int u = 0; u < nu; ++u) {
          for (int v = u + 1; v < nu; ++v) {
            const int eu = elu(u);
            const int ev = elu(v);
            if (eu == ev) continue;
            const long su = static_cast<long>(unit_size(u));
            const long sv = static_cast<long>(unit_size(v));
            if (room_[static_cast<std::size_t>(ev)] + sv < su || room_[static_cast<std::size_t>(eu)] + su < sv) continue;
            const long gain = conn(u, ev) - conn(u, eu) + conn(v, eu) - conn(v, ev) -
                              2 * w_[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)];
            if (gain > 0) {
              unplace(u);
              unplace(v);
              place(u, ev);
              place(v, eu);
              improved = true;
            }
          }
        }
      }
      if (!improved) break;
    }
  }

  long cut() const {
    long c = 0;
    for (std::size_t u = 0; u < elu_.size(); ++u) {
      for (std::size_t v = u + 1; v < elu_.size(); ++v) {
        if (elu_[u] != elu_[v]) c += w_[u][v];
      }
    }
    return c;
  }

 private:
  const Units& units_;
  const std::vector<std::vector<long>>& w_;
  std::vector<int> cap_;
  std::vector<int> elu_;
  std::vector<long> room_;
  std::vector<std::vector<long>> conn_;
};

std::vector<std::vector<long>> unit_weights(const Circuit& c, const Units& units) {
  const std::size_t nu = units.members.size();
  std::vector<std::vector<long>> w(nu, std::vector<long>(nu, 0));
  for (const auto& op : c.ops) {
    if (!is_two_qubit(op.kind)) continue;
    const auto a = static_cast<std::size_t>(units.unit_of[static_cast<std::size_t>(op.operands[0])]);
    const auto b = static_cast<std::size_t>(units.unit_of[static_cast<std::size_t>(op.operands[1])]);
    if (a == b) continue;
    ++w[a][b];
    ++w[b][a];
  }
  return w;
}

std::vector<int> qubit_elus(const Units& units, const std::vector<int>& unit_elu) {
  std::vector<int> out(units.unit_of.size());
  for (std::size_t q = 0; q < out.size(); ++q) out[q] = unit_elu[static_cast<std::size_t>(units.unit_of[q])];
  return out;
}

}  // namespace

void validate_map(const QubitMap& map, const Circuit& circuit, const ArchitectureSpec& spec) {
  if (static_cast<int>(map.slots.size()) < circuit.n_qubits) {
    throw ValidationError("qubit q" + std::to_string(map.slots.size()) + " is unmapped");
  }
  std::set<PhysicalQubit> used;
  for (std::size_t q = 0; q < map.slots.size(); ++q) {
    const auto& s = map.slots[q];
    if (s.elu < 0 || s.elu >= static_cast<int>(spec.elus.size())) {
      throw ValidationError("q" + std::to_string(q) + " mapped to unknown ELU");
    }
    const auto& e = spec.elus[static_cast<std::size_t>(s.elu)];
    if (s.position < 0 || s.position >= e.n_ions) {
      throw ValidationError("q" + std::to_string(q) + " mapped outside chain of " + e.id);
    }
    if (e.is_comm_ion(s.position)) {
      throw ValidationError("q" + std::to_string(q) + " mapped to communication ion " + e.id + ":" +
                            std::to_string(s.position));
    }
    if (!used.insert(s).second) {
      throw ValidationError("duplicate map target " + e.id + ":" + std::to_string(s.position));
    }
  }
}

int crossing_count(const Circuit& circuit, const QubitMap& map) {
  int n = 0;
  for (const auto& op : circuit.ops) {
    if (!is_two_qubit(op.kind)) continue;
    if (map.slots.at(static_cast<std::size_t>(op.operands[0])).elu !=
        map.slots.at(static_cast<std::size_t>(op.operands[1])).elu) {
      ++n;
    }
  }
  return n;
}

QubitMap assign_qubits(const Circuit& circuit, const ArchitectureSpec& spec, MapStrategy strategy,
                       const QubitMap& user) {
  require_valid(spec);
  require_fits(circuit, spec);
  if (strategy == MapStrategy::kUser) {
    if (static_cast<int>(user.slots.size()) != circuit.n_qubits) {
      throw ValidationError("user map has " + std::to_string(user.slots.size()) + " entries for " +
                            std::to_string(circuit.n_qubits) + " qubits");
    }
    validate_map(user, circuit, spec);
    return user;
  }
  const Units units = build_units(circuit);
  const auto w = unit_weights(circuit, units);
  Partitioner part(units, w, capacities(spec));

  if (strategy == MapStrategy::kRoundRobin) {
    if (!part.round_robin()) throw ValidationError("GLOBAL_MS groups do not fit the ELUs");
    return map_from_elus(qubit_elus(units, part.assignment()), spec);
  }

  // Two starts, greedy growth and round robin, each refined.
  std::optional<std::pair<long, std::vector<int>>> best;
  if (part.construct()) {
    part.refine();
    best = {part.cut(), part.assignment()};
  }
  if (part.round_robin()) {
    part.refine();
    if (!best || part.cut() < best->first) best = {part.cut(), part.assignment()};
  }
  if (!best) throw ValidationError("GLOBAL_MS groups do not fit the ELUs");
  return map_from_elus(qubit_elus(units, best->second), spec);
}

BestMap brute_force_best_map(const Circuit& circuit, const ArchitectureSpec& spec) {
  require_valid(spec);
  const int n = circuit.n_qubits;
  const int ne = static_cast<int>(spec.elus.size());
  if (n > 8 || ne > 3) {
    throw DomainError("brute force limited to 8 qubits and 3 ELUs (got " + std::to_string(n) + ", " +
                      std::to_string(ne) + ")");
  }
  require_fits(circuit, spec);
  const auto cap = capacities(spec);
  std::vector<std::pair<int, int>> two_q;
  std::vector<std::vector<int>> groups;
  for (const auto& op : circuit.ops) {
    if (is_two_qubit(op.kind)) two_q.emplace_back(op.operands[0], op.operands[1]);
    if (op.kind == GateKind::kGlobalMS) groups.push_back(op.operands);
  }

  long total = 1;
  for (int i = 0; i < n; ++i) total *= ne;
  std::vector<int> assign(static_cast<std::size_t>(n));
  std::optional<BestMap> best;
  std::vector<int> best_assign;
  for (long code = 0; code < total; ++code) {
    long rest = code;
    for (int q = n - 1; q >= 0; --q) {
      assign[static_cast<std::size_t>(q)] = static_cast<int>(rest % ne);
      rest /= ne;
    }
    std::vector<int> load(static_cast<std::size_t>(ne), 0);
    bool ok = true;
    for (int e : assign) {
      if (++load[static_cast<std::size_t>(e)] > cap[static_cast<std::size_t>(e)]) ok = false;
    }
    for (const auto& g : groups) {
      for (int q : g) {
        if (assign[static_cast<std::size_t>(q)] != assign[static_cast<std::size_t>(g[0])]) ok = false;
      }
    }
    if (!ok) continue;
    int crossings = 0;
    for (auto [a, b] : two_q) {
      if (assign[static_cast<std::size_t>(a)] != assign[static_cast<std::size_t>(b)]) ++crossings;
    }
    if (!best || crossings < best->crossings) {
      best = BestMap{{}, crossings};
      best_assign = assign;
    }
  }
  if (!best) throw ValidationError("no feasible assignment");
  best->map = map_from_elus(best_assign, spec);
  return *best;
}

QubitMap qubit_map_from_json(const ArchitectureSpec& spec, const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("map") || !doc["map"].is_array()) {
    throw SchemaError("qubit map: expected {\"map\": [[elu, position], ...]}");
  }
  for (const auto& [k, _] : doc.items()) {
    if (k != "map") throw SchemaError("qubit map." + k + ": unknown key");
  }
  QubitMap m;
  for (std::size_t i = 0; i < doc["map"].size(); ++i) {
    const auto& e = doc["map"][i];
    const std::string where = "qubit map.map[" + std::to_string(i) + "]";
    if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_number_integer()) {
      throw SchemaError(where + ": expected [elu id, position]");
    }
    const int elu = spec.elu_index(e[0].get<std::string>());
    if (elu < 0) throw SchemaError(where + ": unknown ELU '" + e[0].get<std::string>() + "'");
    m.slots.push_back({elu, e[1].get<int>()});
  }
  return m;
}

nlohmann::json to_json(const ArchitectureSpec& spec, const QubitMap& map) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : map.slots) arr.push_back({spec.elus.at(static_cast<std::size_t>(s.elu)).id, s.position});
  return {{"map", arr}};
}

// ---------------------------------------------------------------------------
// scheduling

namespace {

struct WorkOp {
  GateOp op;
  int source = -1;
  std::vector<PhysicalQubit> ions;
  std::string resource;
  bool remote = false;
  double duration = 0.0;  // excludes the pair wait
  double fidelity = 1.0;
  bool isolation = false;
};

std::string elu_pair_label(const ArchitectureSpec& spec, int a, int b) {
  if (a > b) std::swap(a, b);
  return spec.elus[static_cast<std::size_t>(a)].id + "~" + spec.elus[static_cast<std::size_t>(b)].id;
}

// Moves `q` toward `target` in hops of at most d memory positions, emitting
// SWAPs, until the two are within the fast gate distance.
void route_close(int q, PhysicalQubit target, std::vector<PhysicalQubit>& where,
                 std::map<PhysicalQubit, int>& occupant, const ArchitectureSpec& spec,
                 std::vector<WorkOp>& out, double swap_time, double swap_fidelity) {
  const auto& elu = spec.elus[static_cast<std::size_t>(target.elu)];
  const int d = elu.fast_gate_distance;
  while (std::abs(where[static_cast<std::size_t>(q)].position - target.position) > d) {
    const PhysicalQubit from = where[static_cast<std::size_t>(q)];
    const int dir = target.position > from.position ? 1 : -1;
    int step = d;
    while (step > 0 && elu.is_comm_ion(from.position + dir * step)) --step;
    if (step == 0) {
      throw ValidationError("strict proximity: no memory ion within reach in ELU " + elu.id);
    }
    const PhysicalQubit to{from.elu, from.position + dir * step};
    WorkOp w;
    w.op.kind = GateKind::kSwap;
    w.op.operands.push_back(q);
    auto it = occupant.find(to);
    const int other = it == occupant.end() ? -1 : it->second;
    if (other >= 0) w.op.operands.push_back(other);
    w.ions = {from, to};
    w.resource = "swap";
    w.duration = swap_time;
    w.fidelity = swap_fidelity;
    out.push_back(std::move(w));

    occupant.erase(from);
    occupant.erase(to);
    occupant[to] = q;
    where[static_cast<std::size_t>(q)] = to;
    if (other >= 0) {
      occupant[from] = other;
      where[static_cast<std::size_t>(other)] = from;
    }
  }
}

}  // namespace

ScheduleResult schedule(const Circuit& circuit, const QubitMap& map, const ArchitectureSpec& spec,
                        const ScheduleOptions& options) {
  require_valid(spec);
  validate_map(map, circuit, spec);
  const double f1 = spec.single_qubit_gate_fidelity;
  const double f2 = spec.two_qubit_gate_fidelity;
  const double fm = spec.measurement_fidelity;

  std::vector<PhysicalQubit> where(map.slots.begin(), map.slots.begin() + circuit.n_qubits);
  std::map<PhysicalQubit, int> occupant;
  for (int q = 0; q < circuit.n_qubits; ++q) occupant[where[static_cast<std::size_t>(q)]] = q;

  // Lower the program to ion-level work with durations, inserting SWAPs in
  // strict mode.
  std::vector<WorkOp> work;
  std::set<std::pair<int, int>> needed_pairs;
  for (std::size_t i = 0; i < circuit.ops.size(); ++i) {
    const GateOp& op = circuit.ops[i];
    const auto& e0 = spec.elus[static_cast<std::size_t>(where[static_cast<std::size_t>(op.operands[0])].elu)];
    WorkOp w;
    w.op = op;
    w.source = static_cast<int>(i);
    switch (op.kind) {
      case GateKind::kX:
      case GateKind::kH:
      case GateKind::kRZ:
        w.resource = "1q";
        w.duration = e0.single_qubit_gate_time;
        w.fidelity = f1;
        break;
      case GateKind::kMeasure:
        w.resource = "measure";
        w.duration = spec.species.detection_time;
        w.fidelity = fm;
        break;
      case GateKind::kGlobalMS: {
        for (int q : op.operands) {
          if (where[static_cast<std::size_t>(q)].elu != where[static_cast<std::size_t>(op.operands[0])].elu) {
            throw ValidationError("GLOBAL_MS on line " + std::to_string(op.line) + " spans ELUs");
          }
        }
        w.resource = "global";
        w.duration = rates::slow_gate_time(spec, e0);
        w.fidelity = f2;
        break;
      }
      case GateKind::kMS:
      case GateKind::kCNOT: {
        const int qa = op.operands[0];
        const int qb = op.operands[1];
        const int ea = where[static_cast<std::size_t>(qa)].elu;
        const int eb = where[static_cast<std::size_t>(qb)].elu;
        if (ea != eb) {
          const auto& elu_a = spec.elus[static_cast<std::size_t>(ea)];
          const auto& elu_b = spec.elus[static_cast<std::size_t>(eb)];
          w.remote = true;
          w.resource = "remote:" + elu_pair_label(spec, ea, eb);
          w.duration = rates::teleport_overhead_time(spec, elu_a, elu_b) + spec.classical_latency +
                       elu_b.single_qubit_gate_time;
          w.fidelity = f2 * f2 * fm * fm * f1;
          needed_pairs.insert({std::min(ea, eb), std::max(ea, eb)});
          break;
        }
        const auto& elu = spec.elus[static_cast<std::size_t>(ea)];
        if (options.strict_proximity) {
          route_close(qa, where[static_cast<std::size_t>(qb)], where, occupant, spec, work,
                      3.0 * rates::fast_gate_time(spec, elu), f2 * f2 * f2);
        }
        const int gap = std::abs(where[static_cast<std::size_t>(qa)].position -
                                 where[static_cast<std::size_t>(qb)].position);
        if (gap <= elu.fast_gate_distance) {
          w.resource = "fast";
          w.duration = rates::fast_gate_time(spec, elu);
        } else {
          w.resource = "slow";
          w.duration = rates::slow_gate_time(spec, elu);
        }
        w.fidelity = f2;
        break;
      }
      case GateKind::kSwap:
        throw ValidationError("SWAP is not a program gate");
    }
    for (int q : op.operands) w.ions.push_back(where[static_cast<std::size_t>(q)]);
    work.push_back(std::move(w));
  }

  // Measurement isolation, charged statically so that durations do not
  // depend on pair arrival times.
  if (spec.measurement_isolation) {
    for (std::size_t k = 0; k < work.size(); ++k) {
      WorkOp& w = work[k];
      if (w.op.kind != GateKind::kMeasure) continue;
      const PhysicalQubit self = w.ions[0];
      bool others_later = false;
      for (std::size_t j = k + 1; j < work.size() && !others_later; ++j) {
        for (const auto& ion : work[j].ions) {
          if (ion.elu == self.elu && !(ion == self)) {
            others_later = true;
            break;
          }
        }
      }
      if (others_later) {
        w.isolation = true;
        w.duration += spec.elus[static_cast<std::size_t>(self.elu)].shuttle_cost_time;
      }
    }
  }

  // Dependencies through shared ions, in program order.
  const std::size_t n_work = work.size();
  std::vector<std::vector<std::size_t>> succ(n_work);
  std::vector<int> indegree(n_work, 0);
  {
    std::map<PhysicalQubit, std::size_t> last;
    for (std::size_t k = 0; k < n_work; ++k) {
      std::set<std::size_t> preds;
      for (const auto& ion : work[k].ions) {
        auto it = last.find(ion);
        if (it != last.end()) preds.insert(it->second);
        last[ion] = k;
      }
      for (std::size_t p : preds) succ[p].push_back(k);
      indegree[k] = static_cast<int>(preds.size());
    }
  }

  std::optional<netsim::Simulator> sim;
  if (options.supply == PairSupply::kBuffered && !needed_pairs.empty()) {
    std::vector<std::pair<int, int>> pairs(needed_pairs.begin(), needed_pairs.end());
    netsim::SimOptions sim_opts;
    sim_opts.record_events = false;
    sim_opts.record_occupancy = false;
    sim.emplace(spec, std::vector<netsim::ScheduledConfig>{{0.0, netsim::auto_config(spec, pairs)}},
                options.seed, sim_opts);
  }

  std::vector<double> ready(n_work, 0.0);
  std::vector<double> start(n_work, 0.0);
  std::vector<double> end(n_work, 0.0);
  std::vector<double> wait(n_work, 0.0);
  using Key = std::pair<double, std::size_t>;
  std::priority_queue<Key, std::vector<Key>, std::greater<>> queue;
  for (std::size_t k = 0; k < n_work; ++k) {
    if (indegree[k] == 0) queue.push({0.0, k});
  }
  std::map<int, std::size_t> pending;  // request id -> work index
  std::size_t done = 0;

  auto complete = [&](std::size_t k, double t_end) {
    end[k] = t_end;
    ++done;
    for (std::size_t s : succ[k]) {
      ready[s] = std::max(ready[s], t_end);
      if (--indegree[s] == 0) queue.push({ready[s], s});
    }
  };

  while (done < n_work) {
    const double t_op = queue.empty() ? kInf : queue.top().first;
    if (!pending.empty()) {
      const double t_net = sim->next_event_time().value_or(kInf);
      if (t_net <= t_op) {
        if (!std::isfinite(t_net)) throw ValidationError("pair supply stalled: no link can deliver");
        if (t_net > options.max_time) {
          throw ValidationError("pair supply did not catch up by t = " + format_number(options.max_time) + " s");
        }
        sim->step();
        for (auto it = pending.begin(); it != pending.end();) {
          if (auto d = sim->delivery(it->first)) {
            const std::size_t k = it->second;
            wait[k] = d->delivered - start[k];
            complete(k, d->delivered + work[k].duration);
            it = pending.erase(it);
          } else {
            ++it;
          }
        }
        continue;
      }
    }
    const auto [t, k] = queue.top();
    queue.pop();
    start[k] = t;
    if (work[k].remote && sim) {
      const int ea = work[k].ions[0].elu;
      const int eb = work[k].ions[1].elu;
      pending[sim->submit_request(t, ea, eb)] = k;
    } else {
      complete(k, t + work[k].duration);
    }
  }

  ScheduleResult res;
  std::vector<std::size_t> order(n_work);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return start[a] < start[b]; });
  std::vector<double> first_start(static_cast<std::size_t>(circuit.n_qubits), kInf);
  res.busy_time.assign(static_cast<std::size_t>(circuit.n_qubits), 0.0);
  for (std::size_t k : order) {
    const WorkOp& w = work[k];
    TimelineEntry e;
    e.start = start[k];
    e.duration = end[k] - start[k];
    e.op = w.op;
    e.source = w.source;
    e.ions = w.ions;
    for (const auto& ion : w.ions) {
      if (std::find(e.elus.begin(), e.elus.end(), ion.elu) == e.elus.end()) e.elus.push_back(ion.elu);
    }
    e.resource = w.resource;
    e.remote = w.remote;
    e.pair_wait = wait[k];
    e.fidelity = w.fidelity;
    e.isolation_charged = w.isolation;
    res.makespan = std::max(res.makespan, end[k]);
    if (w.remote) {
      ++res.remote_ops;
      ++res.pairs_consumed;
      res.pair_wait_total += wait[k];
    }
    if (w.op.kind == GateKind::kSwap) ++res.swaps_inserted;
    for (int q : w.op.operands) {
      first_start[static_cast<std::size_t>(q)] = std::min(first_start[static_cast<std::size_t>(q)], e.start);
      res.busy_time[static_cast<std::size_t>(q)] += e.duration;
    }
    res.timeline.push_back(std::move(e));
  }
  res.idle_time.assign(static_cast<std::size_t>(circuit.n_qubits), 0.0);
  for (std::size_t q = 0; q < res.idle_time.size(); ++q) {
    if (std::isfinite(first_start[q])) {
      res.idle_time[q] = std::max(0.0, res.makespan - first_start[q] - res.busy_time[q]);
    }
  }
  res.final_map.slots = where;
  res.fidelity = fidelity_estimate(res, spec);
  res.fidelity_estimate = res.fidelity.total;
  return res;
}

FidelityBreakdown fidelity_estimate(const ScheduleResult& result, const ArchitectureSpec& spec) {
  FidelityBreakdown b;
  for (const auto& e : result.timeline) b.gates *= e.fidelity;
  double idle = 0.0;
  for (double t : result.idle_time) idle += t;
  b.idle = std::exp(-idle / spec.species.qubit_coherence_time);
  b.total = b.gates * b.idle;
  return b;
}

std::string timeline_csv(const ArchitectureSpec& spec, const ScheduleResult& result) {
  CsvTable t;
  t.header = {"start_s", "dur_s", "gate", "operands", "elus", "resource"};
  for (const auto& e : result.timeline) {
    std::string ops;
    for (int q : e.op.operands) ops += (ops.empty() ? "q" : " q") + std::to_string(q);
    std::string elus;
    for (int x : e.elus) elus += (elus.empty() ? "" : " ") + spec.elus[static_cast<std::size_t>(x)].id;
    t.rows.push_back({format_number(e.start), format_number(e.duration), to_string(e.op.kind), ops, elus,
                      e.resource});
  }
  return t.str();
}

nlohmann::json to_json(const ArchitectureSpec& spec, const ScheduleResult& r) {
  nlohmann::json timeline = nlohmann::json::array();
  for (const auto& e : r.timeline) {
    nlohmann::json elus = nlohmann::json::array();
    for (int x : e.elus) elus.push_back(spec.elus[static_cast<std::size_t>(x)].id);
    nlohmann::json ions = nlohmann::json::array();
    for (const auto& ion : e.ions) {
      ions.push_back(spec.elus[static_cast<std::size_t>(ion.elu)].id + ":" + std::to_string(ion.position));
    }
    nlohmann::json j = {{"start", e.start},       {"duration", e.duration}, {"gate", to_string(e.op.kind)},
                        {"operands", e.op.operands}, {"elus", elus},      {"ions", ions},
                        {"resource", e.resource}, {"fidelity", e.fidelity}};
    if (e.op.angle) j["angle"] = *e.op.angle;
    if (e.remote) j["pair_wait"] = e.pair_wait;
    if (e.isolation_charged) j["isolation"] = true;
    timeline.push_back(j);
  }
  return {{"schema", "ionfab-schedule/1"},
          {"makespan", r.makespan},
          {"pairs_consumed", r.pairs_consumed},
          {"remote_ops", r.remote_ops},
          {"swaps_inserted", r.swaps_inserted},
          {"pair_wait_total", r.pair_wait_total},
          {"fidelity_estimate", r.fidelity_estimate},
          {"fidelity", {{"gates", r.fidelity.gates}, {"idle", r.fidelity.idle}, {"total", r.fidelity.total}}},
          {"idle_time", r.idle_time},
          {"busy_time", r.busy_time},
          {"final_map", to_json(spec, r.final_map)["map"]},
          {"timeline", timeline}};
}

}  // namespace ionfab
