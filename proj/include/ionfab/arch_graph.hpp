#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ionfab/arch_model.hpp"

namespace ionfab {

enum class QubitRole { kMemory, kCommunication };

enum class EdgeTier { kFast, kCollective, kPhotonic };

const char* to_string(QubitRole role);
const char* to_string(EdgeTier tier);

struct QubitNode {
  int elu = 0;  // index into ArchitectureSpec::elus
  std::string elu_id;
  int position = 0;
  QubitRole role = QubitRole::kMemory;
};

struct Edge {
  int a = 0;  // node index, a < b
  int b = 0;
  EdgeTier tier = EdgeTier::kCollective;
  double time_cost = 0.0;  // s
  double fidelity = 1.0;
};

// Tier selections accepted by distance queries.
enum class TierSet { kFast, kCollective, kFastPhotonic };

// Multi-tier connectivity of every ion in the machine. FAST and COLLECTIVE
// edges are both stored for proximity pairs, so FAST is a subset of
// COLLECTIVE by construction. PHOTONIC edges are added with
// with_photonic_link().
class InteractionGraph {
 public:
  InteractionGraph() = default;

  const std::vector<QubitNode>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  int node_count() const { return static_cast<int>(nodes_.size()); }

  // Node index of (ELU index, chain position).
  int node_index(int elu, int position) const;
  std::size_t count(EdgeTier tier) const;
  bool has_edge(int a, int b, EdgeTier tier) const;

  // Adjacency lists for the union of the selected tiers.
  std::vector<std::vector<int>> adjacency(TierSet tiers) const;

  // Returns a copy with a PHOTONIC edge between two communication ions of
  // different ELUs. Throws ValidationError otherwise.
  InteractionGraph with_photonic_link(int a, int b, double time_cost, double fidelity) const;

  friend InteractionGraph build_interaction_graph(const ArchitectureSpec& spec);

 private:
  std::vector<QubitNode> nodes_;
  std::vector<Edge> edges_;
  std::vector<int> elu_offset_;
};

InteractionGraph build_interaction_graph(const ArchitectureSpec& spec);

// Structural invariants: FAST subset of COLLECTIVE, COLLECTIVE complete per
// ELU, PHOTONIC only between comm ions of distinct ELUs. Empty when all hold.
std::vector<std::string> check_graph_invariants(const InteractionGraph& g);

struct DistanceProfile {
  std::map<int, std::int64_t> histogram;  // hop count -> unordered pair count
  std::int64_t unreachable_pairs = 0;
  int max_distance = 0;
};

// Shortest-path hop counts over all unordered node pairs.
DistanceProfile graph_distance_profile(const InteractionGraph& g, TierSet tiers);

nlohmann::json to_json(const InteractionGraph& g, std::optional<EdgeTier> only = std::nullopt);
std::string to_dot(const InteractionGraph& g, std::optional<EdgeTier> only = std::nullopt);

// ---------------------------------------------------------------------------

inline constexpr const char* kIsingSchemaId = "ionfab-ising/1";

// H = sum_{i<j} J_ij s_i s_j + sum_i B_i s_i, s = +-1. Ferromagnetic is J < 0.
// The support mask records which couplings exist, independently of value
// (a freshly generated Boltzmann topology has support but zero J).
class IsingInstance {
 public:
  IsingInstance() = default;
  explicit IsingInstance(int n_spins);

  int n_spins() const { return n_; }
  double coupling(int i, int j) const { return j_[index(i, j)]; }
  bool has_coupling(int i, int j) const { return support_[index(i, j)] != 0; }
  double field(int i) const { return fields_[static_cast<std::size_t>(i)]; }
  bool has_field(int i) const { return field_support_[static_cast<std::size_t>(i)] != 0; }

  // Sets J_ij = J_ji and marks the pair supported. i != j.
  void set_coupling(int i, int j, double value);
  void set_field(int i, double value);

  std::size_t support_edge_count() const;
  // Supported pairs (i < j), lexicographic.
  std::vector<std::pair<int, int>> support_edges() const;

  std::optional<double> alpha;
  double j0 = 1.0;
  std::vector<int> layers;  // Boltzmann layer sizes, empty otherwise

  bool operator==(const IsingInstance&) const = default;

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
  }

  int n_ = 0;
  std::vector<double> j_;
  std::vector<std::uint8_t> support_;
  std::vector<double> fields_;
  std::vector<std::uint8_t> field_support_;
};

// J_ij = j0 / |i - j|^alpha on a unit-spaced chain, B = 0. alpha outside
// [0, 3] requires allow_any_alpha.
IsingInstance power_law_couplings(int n, double alpha, double j0, bool allow_any_alpha = false);

// Reduced (adjacent layers only) or full Boltzmann-machine support with zero
// couplings; local fields supported on every spin.
IsingInstance boltzmann_topology(const std::vector<int>& layer_sizes, bool full);

nlohmann::json to_json(const IsingInstance& inst);
IsingInstance ising_from_json(const nlohmann::json& doc);

}  // namespace ionfab
