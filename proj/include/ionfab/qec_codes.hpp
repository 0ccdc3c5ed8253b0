#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ionfab/arch_model.hpp"

namespace ionfab::qec {

inline constexpr const char* kQecSchemaId = "ionfab-qec/1";

enum class CheckType { kX, kZ };

const char* to_string(CheckType t);

// One check operator, measured with a single ancilla.
struct Check {
  CheckType type = CheckType::kX;
  std::vector<int> data;  // sorted data indices

  bool operator==(const Check&) const = default;
};

struct Cell {
  int row = 0;
  int col = 0;

  bool operator==(const Cell&) const = default;
};

// Bipartite Tanner graph. Node numbering: data qubits 0..n_data-1, then
// check c is node n_data + c.
struct QecGraph {
  std::string family;
  std::map<std::string, int> parameters;
  int n_data = 0;
  std::vector<Check> checks;
  std::optional<int> logical_qubits;
  // Planar coordinates for every node, when the family has a native layout.
  std::optional<std::vector<Cell>> layout;

  int node_count() const { return n_data + static_cast<int>(checks.size()); }
  int check_count(CheckType t) const;
  int max_check_weight() const;
  std::optional<double> rate() const;

  bool operator==(const QecGraph&) const = default;
};

// Dense binary matrix, row-major.
class BinaryMatrix {
 public:
  BinaryMatrix() = default;
  BinaryMatrix(int rows, int cols);
  BinaryMatrix(std::initializer_list<std::initializer_list<int>> rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool at(int r, int c) const { return bits_[idx(r, c)] != 0; }
  void set(int r, int c, bool v) { bits_[idx(r, c)] = v ? 1 : 0; }
  bool is_zero() const;
  int row_weight(int r) const;
  int col_weight(int c) const;
  int max_row_weight() const;
  int max_col_weight() const;

  bool operator==(const BinaryMatrix&) const = default;

 private:
  std::size_t idx(int r, int c) const {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(c);
  }
  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::uint8_t> bits_;
};

// Dense 0/1 CSV, one matrix row per line.
BinaryMatrix parse_binary_csv(const std::string& text);
int gf2_rank(const BinaryMatrix& m);

// (n-1) x n parity checks of the length-n repetition code.
BinaryMatrix repetition_code(int n);

// Rotated planar patch: d^2 data, d^2 - 1 checks, native planar layout.
QecGraph surface_code_graph(int distance);
// Steane [[7,1,3]] concatenated `levels` times; 7^L data.
QecGraph steane_concat_graph(int levels);
// Hypergraph product of two classical check matrices.
QecGraph hypergraph_product_graph(const BinaryMatrix& h1, const BinaryMatrix& h2);

// Pairs (x_check, z_check) whose supports overlap on an odd number of data
// qubits. Empty for a valid CSS code.
std::vector<std::pair<int, int>> anticommuting_pairs(const QecGraph& code);

nlohmann::json to_json(const QecGraph& code);
QecGraph qec_from_json(const nlohmann::json& doc);

// ---------------------------------------------------------------------------
// embedding

enum class GridPlacement { kRowMajor, kRandom, kNative };
enum class Partition { kGreedyCut, kRoundRobin, kUserMap };

// Swaps needed to bring two qubits `hops` apart into contact and back.
int swaps_for_hops(int hops);

struct CheckCost {
  int check = 0;
  int route_length = 0;  // hops summed over the check's arms
  int span = 0;          // longest single arm, hops
  int swaps = 0;
  int remote_elus = 0;   // modular host only
};

struct EmbeddingReport {
  std::string host;  // "grid" or "modular"
  int grid_side = 0;
  std::vector<CheckCost> checks;
  std::int64_t swap_count = 0;
  int max_check_span = 0;
  double mean_route_length = 0.0;
  double mean_span = 0.0;

  // modular host
  std::vector<std::string> node_elu;   // ELU id per node
  int pairs_per_round = 0;
  int max_intra_route_length = 0;      // hop distance on the COLLECTIVE tier
  std::vector<int> nodes_per_elu;
};

// Cells for each node on a square grid (smallest side that fits unless the
// placement is native).
std::vector<Cell> grid_placement(const QecGraph& code, GridPlacement placement, std::uint64_t seed);

EmbeddingReport embed_on_grid(const QecGraph& code, GridPlacement placement, std::uint64_t seed = 0);
EmbeddingReport embed_with_cells(const QecGraph& code, const std::vector<Cell>& cells);

// Assigns every node to an ELU. Capacity of an ELU is its ion count.
std::vector<int> partition_nodes(const QecGraph& code, const ArchitectureSpec& spec,
                                 Partition partition,
                                 const std::vector<std::string>& user_map = {});

EmbeddingReport embed_on_modular(const QecGraph& code, const ArchitectureSpec& spec,
                                 Partition partition,
                                 const std::vector<std::string>& user_map = {});
EmbeddingReport embed_with_partition(const QecGraph& code, const ArchitectureSpec& spec,
                                     const std::vector<int>& node_elu);

// Entangled pairs consumed per syndrome round: one per distinct remote ELU
// touched by each check.
int pairs_per_round(const QecGraph& code, const std::vector<int>& node_elu);

nlohmann::json to_json(const EmbeddingReport& report);

}  // namespace ionfab::qec
