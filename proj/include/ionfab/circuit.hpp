#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace ionfab {

enum class GateKind { kX, kH, kRZ, kMS, kCNOT, kGlobalMS, kMeasure, kSwap };

const char* to_string(GateKind kind);
bool is_two_qubit(GateKind kind);  // MS, CNOT (SWAP is routing only)

struct GateOp {
  GateKind kind = GateKind::kX;
  std::vector<int> operands;
  std::optional<double> angle;  // radians
  int line = 0;                 // source line, 0 when synthesised

  bool operator==(const GateOp& o) const {
    return kind == o.kind && operands == o.operands && angle == o.angle;
  }
};

struct Circuit {
  int n_qubits = 0;
  std::vector<GateOp> ops;

  bool operator==(const Circuit&) const = default;
};

// Grammar, one statement per line:
//   qubits <n>                      header, first statement
//   X|H|MEASURE q<i>
//   RZ q<i> <angle>
//   MS q<i> q<j> [<angle>]
//   CNOT q<i> q<j>
//   GLOBAL_MS q<i> q<j> ... [<angle>]
// '#' starts a comment. Throws ParseError with a 1-based line:column.
Circuit parse_circuit(const std::string& text);

// Canonical text; parse_circuit(to_text(c)) == c.
std::string to_text(const Circuit& c);
nlohmann::json to_json(const Circuit& c);

}  // namespace ionfab
