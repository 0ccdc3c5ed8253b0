#include "ionfab/qec_codes.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "ionfab/errors.hpp"

namespace ionfab::qec {

const char* to_string(CheckType t) { return t == CheckType::kX ? "X" : "Z"; }

int QecGraph::check_count(CheckType t) const {
  return static_cast<int>(
      std::count_if(checks.begin(), checks.end(), [&](const Check& c) { return c.type == t; }));
}

int QecGraph::max_check_weight() const {
  std::size_t w = 0;
  for (const auto& c : checks) w = std::max(w, c.data.size());
  return static_cast<int>(w);
}

std::optional<double> QecGraph::rate() const {
  if (!logical_qubits || n_data == 0) return std::nullopt;
  return static_cast<double>(*logical_qubits) / n_data;
}

// ---------------------------------------------------------------------------

BinaryMatrix::BinaryMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw DomainError("negative matrix dimension");
  bits_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0);
}

BinaryMatrix::BinaryMatrix(std::initializer_list<std::initializer_list<int>> rows) {
  rows_ = static_cast<int>(rows.size());
  cols_ = rows_ ? static_cast<int>(rows.begin()->size()) : 0;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != cols_) throw DomainError("ragged matrix");
    for (int v : row) bits_.push_back(v ? 1 : 0);
  }
}

bool BinaryMatrix::is_zero() const {
  return std::all_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b == 0; });
}

int BinaryMatrix::row_weight(int r) const {
  int w = 0;
  for (int c = 0; c < cols_; ++c) w += at(r, c);
  return w;
}

int BinaryMatrix::col_weight(int c) const {
  int w = 0;
  for (int r = 0; r < rows_; ++r) w += at(r, c);
  return w;
}

int BinaryMatrix::max_row_weight() const {
  int w = 0;
  for (int r = 0; r < rows_; ++r) w = std::max(w, row_weight(r));
  return w;
}

int BinaryMatrix::max_col_weight() const {
  int w = 0;
  for (int c = 0; c < cols_; ++c) w = std::max(w, col_weight(c));
  return w;
}

BinaryMatrix parse_binary_csv(const std::string& text) {
  std::vector<std::vector<int>> rows;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<int> row;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      const auto b = field.find_first_not_of(" \t");
      const auto e = field.find_last_not_of(" \t");
      const std::string tok = b == std::string::npos ? "" : field.substr(b, e - b + 1);
      if (tok != "0" && tok != "1") {
        throw SchemaError("line " + std::to_string(line_no) + ": expected 0 or 1, got '" + tok + "'");
      }
      row.push_back(tok == "1");
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw SchemaError("line " + std::to_string(line_no) + ": row length differs from first row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw SchemaError("empty check matrix");
  BinaryMatrix m(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) m.set(r, c, rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
  }
  return m;
}

int gf2_rank(const BinaryMatrix& input) {
  BinaryMatrix m = input;
  int rank = 0;
  for (int c = 0; c < m.cols() && rank < m.rows(); ++c) {
    int pivot = -1;
    for (int r = rank; r < m.rows(); ++r) {
      if (m.at(r, c)) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) continue;
    for (int k = 0; k < m.cols(); ++k) {
      const bool t = m.at(pivot, k);
      m.set(pivot, k, m.at(rank, k));
      m.set(rank, k, t);
    }
    for (int r = 0; r < m.rows(); ++r) {
      if (r != rank && m.at(r, c)) {
        for (int k = 0; k < m.cols(); ++k) m.set(r, k, m.at(r, k) != m.at(rank, k));
      }
    }
    ++rank;
  }
  return rank;
}

BinaryMatrix repetition_code(int n) {
  if (n < 2) throw DomainError("repetition code needs n >= 2");
  BinaryMatrix h(n - 1, n);
  for (int r = 0; r < n - 1; ++r) {
    h.set(r, r, true);
    h.set(r, r + 1, true);
  }
  return h;
}

// ---------------------------------------------------------------------------

QecGraph surface_code_graph(int d) {
  if (d < 3 || d % 2 == 0) throw DomainError("surface code distance must be odd and >= 3");
  QecGraph g;
  g.family = "surface";
  g.parameters["distance"] = d;
  g.n_data = d * d;
  g.logical_qubits = 1;

  // Data (r, c) sits at doubled coordinates (2c+1, 2r+1); plaquette corner
  // (i, j) at (2j, 2i). Rotating by 45 degrees makes every data-check pair
  // Manhattan-adjacent: u = (x+y)/2, v = (x-y)/2 + d.
  std::vector<Cell> layout;
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) layout.push_back({r + c + 1, c - r + d});
  }
  for (int i = 0; i <= d; ++i) {
    for (int j = 0; j <= d; ++j) {
      const CheckType type = (i + j) % 2 == 0 ? CheckType::kX : CheckType::kZ;
      const bool top_bottom = i == 0 || i == d;
      const bool left_right = j == 0 || j == d;
      if (top_bottom && left_right) continue;
      if (top_bottom && type != CheckType::kX) continue;
      if (left_right && type != CheckType::kZ) continue;
      Check check{type, {}};
      for (int r = i - 1; r <= i; ++r) {
        for (int c = j - 1; c <= j; ++c) {
          if (r >= 0 && r < d && c >= 0 && c < d) check.data.push_back(r * d + c);
        }
      }
      g.checks.push_back(std::move(check));
      layout.push_back({i + j, j - i + d});
    }
  }
  g.layout = std::move(layout);
  return g;
}

namespace {

constexpr int kSteaneRows[3][4] = {{3, 4, 5, 6}, {1, 2, 5, 6}, {0, 2, 4, 6}};

}  // namespace

QecGraph steane_concat_graph(int levels) {
  if (levels < 1) throw DomainError("Steane concatenation needs levels >= 1");
  int block = 1;  // data per sub-block at the current level
  std::vector<Check> checks;
  for (int level = 1; level <= levels; ++level) {
    std::vector<Check> lifted;
    if (level > 1) {
      for (int b = 0; b < 7; ++b) {
        for (const auto& c : checks) {
          Check copy{c.type, {}};
          for (int q : c.data) copy.data.push_back(q + b * block);
          lifted.push_back(std::move(copy));
        }
      }
    }
    // Top-level checks act on the transversal logical of each block in the row.
    for (CheckType type : {CheckType::kX, CheckType::kZ}) {
      for (const auto& row : kSteaneRows) {
        Check c{type, {}};
        for (int b : row) {
          for (int q = 0; q < block; ++q) c.data.push_back(b * block + q);
        }
        lifted.push_back(std::move(c));
      }
    }
    checks = std::move(lifted);
    block *= 7;
  }
  QecGraph g;
  g.family = "steane";
  g.parameters["levels"] = levels;
  g.n_data = block;
  g.checks = std::move(checks);
  g.logical_qubits = 1;
  return g;
}

QecGraph hypergraph_product_graph(const BinaryMatrix& h1, const BinaryMatrix& h2) {
  if (h1.rows() == 0 || h1.cols() == 0 || h2.rows() == 0 || h2.cols() == 0) {
    throw DomainError("check matrices must have non-zero dimensions");
  }
  if (h1.is_zero() || h2.is_zero()) throw DomainError("check matrix is all zero");
  const int m1 = h1.rows(), n1 = h1.cols(), m2 = h2.rows(), n2 = h2.cols();

  // Data: block A = (i in n1, j in n2) -> i*n2 + j; block B = (a in m1, b in m2).
  auto data_a = [&](int i, int j) { return i * n2 + j; };
  auto data_b = [&](int a, int b) { return n1 * n2 + a * m2 + b; };

  QecGraph g;
  g.family = "hypergraph_product";
  g.parameters = {{"m1", m1}, {"n1", n1}, {"m2", m2}, {"n2", n2}};
  g.n_data = n1 * n2 + m1 * m2;
  // X checks: H_X = [H1 (x) I_n2 | I_m1 (x) H2^T], rows (a, j).
  for (int a = 0; a < m1; ++a) {
    for (int j = 0; j < n2; ++j) {
      Check c{CheckType::kX, {}};
      for (int i = 0; i < n1; ++i) {
        if (h1.at(a, i)) c.data.push_back(data_a(i, j));
      }
      for (int b = 0; b < m2; ++b) {
        if (h2.at(b, j)) c.data.push_back(data_b(a, b));
      }
      g.checks.push_back(std::move(c));
    }
  }
  // Z checks: H_Z = [I_n1 (x) H2 | H1^T (x) I_m2], rows (i, b).
  for (int i = 0; i < n1; ++i) {
    for (int b = 0; b < m2; ++b) {
      Check c{CheckType::kZ, {}};
      for (int j = 0; j < n2; ++j) {
        if (h2.at(b, j)) c.data.push_back(data_a(i, j));
      }
      for (int a = 0; a < m1; ++a) {
        if (h1.at(a, i)) c.data.push_back(data_b(a, b));
      }
      g.checks.push_back(std::move(c));
    }
  }
  for (auto& c : g.checks) std::sort(c.data.begin(), c.data.end());
  // Empty rows/columns yield checks with no support; drop them.
  std::erase_if(g.checks, [](const Check& c) { return c.data.empty(); });

  const int r1 = gf2_rank(h1), r2 = gf2_rank(h2);
  g.logical_qubits = (n1 - r1) * (n2 - r2) + (m1 - r1) * (m2 - r2);
  return g;
}

std::vector<std::pair<int, int>> anticommuting_pairs(const QecGraph& code) {
  std::vector<std::pair<int, int>> bad;
  std::vector<std::uint8_t> mark(static_cast<std::size_t>(code.n_data), 0);
  for (std::size_t x = 0; x < code.checks.size(); ++x) {
    if (code.checks[x].type != CheckType::kX) continue;
    for (int q : code.checks[x].data) mark[static_cast<std::size_t>(q)] = 1;
    for (std::size_t z = 0; z < code.checks.size(); ++z) {
      if (code.checks[z].type != CheckType::kZ) continue;
      int overlap = 0;
      for (int q : code.checks[z].data) overlap += mark[static_cast<std::size_t>(q)];
      if (overlap % 2) bad.emplace_back(static_cast<int>(x), static_cast<int>(z));
    }
    for (int q : code.checks[x].data) mark[static_cast<std::size_t>(q)] = 0;
  }
  return bad;
}

nlohmann::json to_json(const QecGraph& code) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : code.checks) checks.push_back({{"type", to_string(c.type)}, {"data", c.data}});
  nlohmann::json doc = {{"schema", kQecSchemaId},
                        {"family", code.family},
                        {"parameters", code.parameters},
                        {"n_data", code.n_data},
                        {"checks", checks}};
  doc["logical_qubits"] = code.logical_qubits ? nlohmann::json(*code.logical_qubits) : nlohmann::json();
  if (code.layout) {
    nlohmann::json layout = nlohmann::json::array();
    for (const auto& cell : *code.layout) layout.push_back({cell.row, cell.col});
    doc["layout"] = layout;
  }
  return doc;
}

QecGraph qec_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw SchemaError("QEC graph: expected object");
  static const std::set<std::string> allowed = {"schema", "family", "parameters", "n_data",
                                                "checks", "logical_qubits", "layout"};
  for (const auto& [key, _] : doc.items()) {
    if (!allowed.count(key)) throw SchemaError(key + ": unknown key");
  }
  if (doc.contains("schema") && doc["schema"] != kQecSchemaId) {
    throw SchemaError(std::string("schema: expected \"") + kQecSchemaId + "\"");
  }
  QecGraph g;
  try {
    g.family = doc.value("family", std::string("custom"));
    if (doc.contains("parameters")) g.parameters = doc["parameters"].get<std::map<std::string, int>>();
    if (!doc.contains("n_data")) throw SchemaError("n_data: missing required field");
    g.n_data = doc.at("n_data").get<int>();
    if (!doc.contains("checks")) throw SchemaError("checks: missing required field");
    for (const auto& c : doc.at("checks")) {
      const std::string type = c.at("type").get<std::string>();
      if (type != "X" && type != "Z") throw SchemaError("checks: type must be X or Z");
      Check check{type == "X" ? CheckType::kX : CheckType::kZ, c.at("data").get<std::vector<int>>()};
      std::sort(check.data.begin(), check.data.end());
      g.checks.push_back(std::move(check));
    }
    if (doc.contains("logical_qubits") && !doc["logical_qubits"].is_null()) {
      g.logical_qubits = doc["logical_qubits"].get<int>();
    }
    if (doc.contains("layout")) {
      std::vector<Cell> cells;
      for (const auto& cell : doc["layout"]) cells.push_back({cell.at(0).get<int>(), cell.at(1).get<int>()});
      g.layout = std::move(cells);
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("QEC graph: ") + e.what());
  }
  for (const auto& c : g.checks) {
    if (c.data.empty()) throw SchemaError("QEC graph: check without data qubits");
    if (std::adjacent_find(c.data.begin(), c.data.end()) != c.data.end()) {
      throw SchemaError("QEC graph: repeated data index in a check");
    }
    for (int q : c.data) {
      if (q < 0 || q >= g.n_data) throw SchemaError("QEC graph: data index out of range");
    }
  }
  if (g.layout && static_cast<int>(g.layout->size()) != g.node_count()) {
    throw SchemaError("QEC graph: layout size differs from node count");
  }
  return g;
}

}  // namespace ionfab::qec
