#include "ionfab/circuit.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "ionfab/errors.hpp"
#include "ionfab/report.hpp"

namespace ionfab {

const char* to_string(GateKind kind) {
  switch (kind) {
    case GateKind::kX:
      return "X";
    case GateKind::kH:
      return "H";
    case GateKind::kRZ:
      return "RZ";
    case GateKind::kMS:
      return "MS";
    case GateKind::kCNOT:
      return "CNOT";
    case GateKind::kGlobalMS:
      return "GLOBAL_MS";
    case GateKind::kMeasure:
      return "MEASURE";
    case GateKind::kSwap:
      return "SWAP";
  }
  return "?";
}

bool is_two_qubit(GateKind kind) { return kind == GateKind::kMS || kind == GateKind::kCNOT; }

namespace {

struct Token {
  std::string text;
  int column;  // 1-based
};

std::vector<Token> tokenize(const std::string& line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (line[i] == '#') break;
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < line.size() && line[i] != '#' && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return out;
}

double parse_angle(const Token& t, int line) {
  double v = 0.0;
  const char* first = t.text.data();
  const char* last = first + t.text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ParseError(line, t.column, "malformed number '" + t.text + "'");
  }
  return v;
}

int parse_count(const Token& t, int line) {
  int v = 0;
  const char* first = t.text.data();
  const char* last = first + t.text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || v < 0) {
    throw ParseError(line, t.column, "malformed number '" + t.text + "'");
  }
  return v;
}

bool is_operand(const Token& t) { return !t.text.empty() && t.text[0] == 'q'; }

int parse_operand(const Token& t, int line, int n) {
  int v = 0;
  const char* first = t.text.data() + 1;
  const char* last = t.text.data() + t.text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (first == last || ec != std::errc() || ptr != last || v < 0) {
    throw ParseError(line, t.column, "malformed qubit '" + t.text + "'");
  }
  if (v >= n) {
    throw ParseError(line, t.column,
                     "qubit index " + std::to_string(v) + " >= " + std::to_string(n));
  }
  return v;
}

struct GateShape {
  GateKind kind;
  int min_operands;
  int max_operands;  // -1: unbounded
  bool angle_required;
  bool angle_allowed;
};

std::optional<GateShape> lookup(const std::string& name) {
  if (name == "X") return GateShape{GateKind::kX, 1, 1, false, false};
  if (name == "H") return GateShape{GateKind::kH, 1, 1, false, false};
  if (name == "RZ") return GateShape{GateKind::kRZ, 1, 1, true, true};
  if (name == "MS") return GateShape{GateKind::kMS, 2, 2, false, true};
  if (name == "CNOT") return GateShape{GateKind::kCNOT, 2, 2, false, false};
  if (name == "GLOBAL_MS") return GateShape{GateKind::kGlobalMS, 2, -1, false, true};
  if (name == "MEASURE") return GateShape{GateKind::kMeasure, 1, 1, false, false};
  return std::nullopt;
}

}  // namespace

Circuit parse_circuit(const std::string& text) {
  Circuit c;
  bool have_header = false;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const auto tokens = tokenize(raw);
    if (tokens.empty()) continue;
    const Token& head = tokens[0];

    if (head.text == "qubits") {
      if (have_header) throw ParseError(line, head.column, "duplicate 'qubits' header");
      if (tokens.size() != 2) throw ParseError(line, head.column, "expected 'qubits <n>'");
      c.n_qubits = parse_count(tokens[1], line);
      have_header = true;
      continue;
    }
    if (!have_header) throw ParseError(line, head.column, "expected 'qubits <n>' header first");

    const auto shape = lookup(head.text);
    if (!shape) throw ParseError(line, head.column, "unknown gate '" + head.text + "'");

    GateOp op;
    op.kind = shape->kind;
    op.line = line;
    std::set<int> seen;
    std::size_t i = 1;
    for (; i < tokens.size() && is_operand(tokens[i]); ++i) {
      const int q = parse_operand(tokens[i], line, c.n_qubits);
      if (!seen.insert(q).second) {
        throw ParseError(line, tokens[i].column, "duplicate operand q" + std::to_string(q));
      }
      op.operands.push_back(q);
    }
    const int n_ops = static_cast<int>(op.operands.size());
    if (n_ops < shape->min_operands || (shape->max_operands >= 0 && n_ops > shape->max_operands)) {
      const std::string want =
          shape->max_operands < 0 ? "at least " + std::to_string(shape->min_operands)
                                  : std::to_string(shape->min_operands);
      throw ParseError(line, head.column,
                       head.text + " takes " + want + " qubit(s), got " + std::to_string(n_ops));
    }
    if (i < tokens.size()) {
      if (!shape->angle_allowed) {
        throw ParseError(line, tokens[i].column, head.text + " takes no angle");
      }
      op.angle = parse_angle(tokens[i], line);
      ++i;
    }
    if (i < tokens.size()) throw ParseError(line, tokens[i].column, "unexpected '" + tokens[i].text + "'");
    if (shape->angle_required && !op.angle) {
      throw ParseError(line, static_cast<int>(raw.find_last_not_of(" \t")) + 2,
                       head.text + " needs an angle");
    }
    c.ops.push_back(std::move(op));
  }
  if (!have_header) throw ParseError(line + 1, 1, "missing 'qubits <n>' header");
  return c;
}

std::string to_text(const Circuit& c) {
  std::string out = "qubits " + std::to_string(c.n_qubits) + "\n";
  for (const auto& op : c.ops) {
    out += to_string(op.kind);
    for (int q : op.operands) out += " q" + std::to_string(q);
    if (op.angle) out += " " + format_number(*op.angle);
    out += "\n";
  }
  return out;
}

nlohmann::json to_json(const Circuit& c) {
  nlohmann::json ops = nlohmann::json::array();
  for (const auto& op : c.ops) {
    nlohmann::json o = {{"gate", to_string(op.kind)}, {"operands", op.operands}};
    if (op.angle) o["angle"] = *op.angle;
    ops.push_back(o);
  }
  return {{"n_qubits", c.n_qubits}, {"ops", ops}};
}

}  // namespace ionfab
