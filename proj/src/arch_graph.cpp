#include "ionfab/arch_graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>

#include "ionfab/errors.hpp"
#include "ionfab/phys_rates.hpp"
#include "ionfab/report.hpp"

namespace ionfab {

const char* to_string(QubitRole role) {
  return role == QubitRole::kMemory ? "memory" : "communication";
}

const char* to_string(EdgeTier tier) {
  switch (tier) {
    case EdgeTier::kFast:
      return "FAST";
    case EdgeTier::kCollective:
      return "COLLECTIVE";
    case EdgeTier::kPhotonic:
      return "PHOTONIC";
  }
  return "?";
}

int InteractionGraph::node_index(int elu, int position) const {
  if (elu < 0 || elu >= static_cast<int>(elu_offset_.size()) - 1) {
    throw Error("ELU index out of range");
  }
  const int idx = elu_offset_[static_cast<std::size_t>(elu)] + position;
  if (position < 0 || idx >= elu_offset_[static_cast<std::size_t>(elu) + 1]) {
    throw Error("chain position out of range");
  }
  return idx;
}

std::size_t InteractionGraph::count(EdgeTier tier) const {
  return static_cast<std::size_t>(
      std::count_if(edges_.begin(), edges_.end(), [&](const Edge& e) { return e.tier == tier; }));
}

bool InteractionGraph::has_edge(int a, int b, EdgeTier tier) const {
  if (a > b) std::swap(a, b);
  return std::any_of(edges_.begin(), edges_.end(),
                     [&](const Edge& e) { return e.a == a && e.b == b && e.tier == tier; });
}

namespace {

bool tier_selected(EdgeTier tier, TierSet set) {
  switch (set) {
    case TierSet::kFast:
      return tier == EdgeTier::kFast;
    case TierSet::kCollective:
      return tier == EdgeTier::kCollective;
    case TierSet::kFastPhotonic:
      return tier == EdgeTier::kFast || tier == EdgeTier::kPhotonic;
  }
  return false;
}

}  // namespace

std::vector<std::vector<int>> InteractionGraph::adjacency(TierSet tiers) const {
  std::vector<std::vector<int>> adj(nodes_.size());
  for (const auto& e : edges_) {
    if (!tier_selected(e.tier, tiers)) continue;
    adj[static_cast<std::size_t>(e.a)].push_back(e.b);
    adj[static_cast<std::size_t>(e.b)].push_back(e.a);
  }
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return adj;
}

InteractionGraph InteractionGraph::with_photonic_link(int a, int b, double time_cost,
                                                      double fidelity) const {
  if (a < 0 || b < 0 || a >= node_count() || b >= node_count()) {
    throw ValidationError("photonic link endpoint out of range");
  }
  const auto& na = nodes_[static_cast<std::size_t>(a)];
  const auto& nb = nodes_[static_cast<std::size_t>(b)];
  if (na.role != QubitRole::kCommunication || nb.role != QubitRole::kCommunication) {
    throw ValidationError("photonic links join communication ions only");
  }
  if (na.elu == nb.elu) throw ValidationError("photonic link within one ELU");
  InteractionGraph g = *this;
  g.edges_.push_back({std::min(a, b), std::max(a, b), EdgeTier::kPhotonic, time_cost, fidelity});
  return g;
}

InteractionGraph build_interaction_graph(const ArchitectureSpec& spec) {
  require_valid(spec);
  InteractionGraph g;
  g.elu_offset_.push_back(0);
  for (std::size_t ei = 0; ei < spec.elus.size(); ++ei) {
    const auto& elu = spec.elus[ei];
    const int base = g.node_count();
    for (int p = 0; p < elu.n_ions; ++p) {
      g.nodes_.push_back({static_cast<int>(ei), elu.id, p,
                          elu.is_comm_ion(p) ? QubitRole::kCommunication : QubitRole::kMemory});
    }
    g.elu_offset_.push_back(g.node_count());

    const double slow = rates::slow_gate_time(spec, elu);
    const double fast = rates::fast_gate_time(spec, elu);
    for (int i = 0; i < elu.n_ions; ++i) {
      for (int j = i + 1; j < elu.n_ions; ++j) {
        g.edges_.push_back(
            {base + i, base + j, EdgeTier::kCollective, slow, spec.two_qubit_gate_fidelity});
        if (j - i <= elu.fast_gate_distance) {
          g.edges_.push_back(
              {base + i, base + j, EdgeTier::kFast, fast, spec.two_qubit_gate_fidelity});
        }
      }
    }
  }
  return g;
}

std::vector<std::string> check_graph_invariants(const InteractionGraph& g) {
  std::vector<std::string> problems;
  std::set<std::pair<int, int>> collective;
  for (const auto& e : g.edges()) {
    if (e.tier == EdgeTier::kCollective) collective.insert({e.a, e.b});
  }
  const auto& nodes = g.nodes();
  for (const auto& e : g.edges()) {
    const auto& na = nodes[static_cast<std::size_t>(e.a)];
    const auto& nb = nodes[static_cast<std::size_t>(e.b)];
    if (e.tier == EdgeTier::kFast && !collective.count({e.a, e.b})) {
      problems.push_back("FAST edge without COLLECTIVE edge");
    }
    if (e.tier == EdgeTier::kCollective && na.elu != nb.elu) {
      problems.push_back("COLLECTIVE edge across ELUs");
    }
    if (e.tier == EdgeTier::kPhotonic &&
        (na.elu == nb.elu || na.role != QubitRole::kCommunication ||
         nb.role != QubitRole::kCommunication)) {
      problems.push_back("PHOTONIC edge not between comm ions of distinct ELUs");
    }
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      if (nodes[i].elu == nodes[j].elu &&
          !collective.count({static_cast<int>(i), static_cast<int>(j)})) {
        problems.push_back("COLLECTIVE tier incomplete in ELU " + nodes[i].elu_id);
        return problems;
      }
    }
  }
  return problems;
}

DistanceProfile graph_distance_profile(const InteractionGraph& g, TierSet tiers) {
  const auto adj = g.adjacency(tiers);
  const int n = g.node_count();
  DistanceProfile profile;
  std::vector<int> dist(static_cast<std::size_t>(n));
  std::deque<int> queue;
  for (int s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[static_cast<std::size_t>(s)] = 0;
    queue.assign(1, s);
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int v : adj[static_cast<std::size_t>(u)]) {
        if (dist[static_cast<std::size_t>(v)] < 0) {
          dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
          queue.push_back(v);
        }
      }
    }
    for (int t = s + 1; t < n; ++t) {
      const int d = dist[static_cast<std::size_t>(t)];
      if (d < 0) {
        ++profile.unreachable_pairs;
      } else {
        ++profile.histogram[d];
        profile.max_distance = std::max(profile.max_distance, d);
      }
    }
  }
  return profile;
}

nlohmann::json to_json(const InteractionGraph& g, std::optional<EdgeTier> only) {
  nlohmann::json nodes = nlohmann::json::array();
  for (std::size_t i = 0; i < g.nodes().size(); ++i) {
    const auto& n = g.nodes()[i];
    nodes.push_back({{"index", i}, {"elu", n.elu_id}, {"position", n.position},
                     {"role", to_string(n.role)}});
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : g.edges()) {
    if (only && e.tier != *only) continue;
    edges.push_back({{"a", e.a}, {"b", e.b}, {"tier", to_string(e.tier)},
                     {"time_cost", e.time_cost}, {"fidelity", e.fidelity}});
  }
  return {{"nodes", nodes}, {"edges", edges}};
}

std::string to_dot(const InteractionGraph& g, std::optional<EdgeTier> only) {
  std::ostringstream os;
  os << "graph ionfab {\n";
  int current = -1;
  for (std::size_t i = 0; i < g.nodes().size(); ++i) {
    const auto& n = g.nodes()[i];
    if (n.elu != current) {
      if (current >= 0) os << "  }\n";
      current = n.elu;
      os << "  subgraph \"cluster_" << n.elu_id << "\" {\n    label=\"" << n.elu_id << "\";\n";
    }
    os << "    n" << i << " [label=\"" << n.elu_id << ":" << n.position << "\""
       << (n.role == QubitRole::kCommunication ? ", color=purple" : "") << "];\n";
  }
  if (current >= 0) os << "  }\n";
  for (const auto& e : g.edges()) {
    if (only && e.tier != *only) continue;
    const char* color = e.tier == EdgeTier::kFast ? "red"
                        : e.tier == EdgeTier::kCollective ? "blue"
                                                          : "purple";
    os << "  n" << e.a << " -- n" << e.b << " [color=" << color << "];\n";
  }
  os << "}\n";
  return os.str();
}

// ---------------------------------------------------------------------------

IsingInstance::IsingInstance(int n_spins) : n_(n_spins) {
  if (n_spins < 1) throw DomainError("Ising instance needs at least one spin");
  const auto sz = static_cast<std::size_t>(n_spins);
  j_.assign(sz * sz, 0.0);
  support_.assign(sz * sz, 0);
  fields_.assign(sz, 0.0);
  field_support_.assign(sz, 0);
}

void IsingInstance::set_coupling(int i, int j, double value) {
  if (i < 0 || j < 0 || i >= n_ || j >= n_) throw DomainError("spin index out of range");
  if (i == j) throw DomainError("self-coupling is not allowed");
  j_[index(i, j)] = value;
  j_[index(j, i)] = value;
  support_[index(i, j)] = 1;
  support_[index(j, i)] = 1;
}

void IsingInstance::set_field(int i, double value) {
  if (i < 0 || i >= n_) throw DomainError("spin index out of range");
  fields_[static_cast<std::size_t>(i)] = value;
  field_support_[static_cast<std::size_t>(i)] = 1;
}

std::size_t IsingInstance::support_edge_count() const { return support_edges().size(); }

std::vector<std::pair<int, int>> IsingInstance::support_edges() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j) {
      if (has_coupling(i, j)) out.emplace_back(i, j);
    }
  }
  return out;
}

IsingInstance power_law_couplings(int n, double alpha, double j0, bool allow_any_alpha) {
  if (n < 2) throw DomainError("power-law instance needs n >= 2");
  if (!std::isfinite(alpha) || !std::isfinite(j0)) throw DomainError("non-finite parameter");
  if (!allow_any_alpha && (alpha < 0.0 || alpha > 3.0)) {
    throw DomainError("alpha must lie in [0, 3]");
  }
  IsingInstance inst(n);
  inst.alpha = alpha;
  inst.j0 = j0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      inst.set_coupling(i, j, j0 / std::pow(static_cast<double>(j - i), alpha));
    }
  }
  return inst;
}

IsingInstance boltzmann_topology(const std::vector<int>& layer_sizes, bool full) {
  if (layer_sizes.empty()) throw DomainError("Boltzmann topology needs at least one layer");
  int n = 0;
  std::vector<int> start;
  for (int size : layer_sizes) {
    if (size < 1) throw DomainError("layer sizes must be >= 1");
    start.push_back(n);
    n += size;
  }
  IsingInstance inst(n);
  inst.layers = layer_sizes;
  inst.j0 = 0.0;
  if (full) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) inst.set_coupling(i, j, 0.0);
    }
  } else {
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
      for (int a = 0; a < layer_sizes[l]; ++a) {
        for (int b = 0; b < layer_sizes[l + 1]; ++b) {
          inst.set_coupling(start[l] + a, start[l + 1] + b, 0.0);
        }
      }
    }
  }
  for (int i = 0; i < n; ++i) inst.set_field(i, 0.0);
  return inst;
}

nlohmann::json to_json(const IsingInstance& inst) {
  nlohmann::json couplings = nlohmann::json::array();
  for (auto [i, j] : inst.support_edges()) couplings.push_back({i, j, inst.coupling(i, j)});
  nlohmann::json fields = nlohmann::json::array();
  for (int i = 0; i < inst.n_spins(); ++i) {
    if (inst.has_field(i)) fields.push_back({i, inst.field(i)});
  }
  nlohmann::json doc = {{"schema", kIsingSchemaId},
                        {"n", inst.n_spins()},
                        {"alpha", inst.alpha ? nlohmann::json(*inst.alpha) : nlohmann::json()},
                        {"j0", inst.j0},
                        {"couplings", couplings},
                        {"fields", fields}};
  if (!inst.layers.empty()) doc["layers"] = inst.layers;
  return doc;
}

IsingInstance ising_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw SchemaError("Ising instance: expected object");
  static const std::set<std::string> allowed = {"schema", "n",      "alpha", "j0",
                                                "couplings", "fields", "layers"};
  for (const auto& [key, _] : doc.items()) {
    if (!allowed.count(key)) throw SchemaError(key + ": unknown key");
  }
  if (doc.contains("schema") && doc["schema"] != kIsingSchemaId) {
    throw SchemaError(std::string("schema: expected \"") + kIsingSchemaId + "\"");
  }
  if (!doc.contains("n") || !doc["n"].is_number_integer()) {
    throw SchemaError("n: missing or not an integer");
  }
  IsingInstance inst(doc["n"].get<int>());
  if (doc.contains("alpha") && !doc["alpha"].is_null()) {
    if (!doc["alpha"].is_number()) throw SchemaError("alpha: expected number");
    inst.alpha = doc["alpha"].get<double>();
  }
  if (doc.contains("j0")) {
    if (!doc["j0"].is_number()) throw SchemaError("j0: expected number");
    inst.j0 = doc["j0"].get<double>();
  }
  auto triples = [&](const char* key, std::size_t arity) {
    std::vector<nlohmann::json> rows;
    if (!doc.contains(key)) return rows;
    if (!doc[key].is_array()) throw SchemaError(std::string(key) + ": expected array");
    for (std::size_t r = 0; r < doc[key].size(); ++r) {
      const auto& row = doc[key][r];
      const std::string where = std::string(key) + "[" + std::to_string(r) + "]";
      if (!row.is_array() || row.size() != arity) {
        throw SchemaError(where + ": expected array of " + std::to_string(arity));
      }
      for (std::size_t c = 0; c + 1 < arity; ++c) {
        if (!row[c].is_number_integer()) throw SchemaError(where + ": index must be an integer");
      }
      if (!row[arity - 1].is_number()) throw SchemaError(where + ": value must be a number");
      rows.push_back(row);
    }
    return rows;
  };
  try {
    for (const auto& row : triples("couplings", 3)) {
      inst.set_coupling(row[0].get<int>(), row[1].get<int>(), row[2].get<double>());
    }
    for (const auto& row : triples("fields", 2)) {
      inst.set_field(row[0].get<int>(), row[1].get<double>());
    }
  } catch (const DomainError& e) {
    throw SchemaError(std::string("Ising instance: ") + e.what());
  }
  if (doc.contains("layers")) inst.layers = doc["layers"].get<std::vector<int>>();
  return inst;
}

}  // namespace ionfab
