#include <gtest/gtest.h>

#include "golden.hpp"
#include "ionfab/circuit.hpp"
#include "ionfab/errors.hpp"
#include "ionfab/report.hpp"
#include "ionfab/rng.hpp"

using namespace ionfab;

namespace {

// Location of the ParseError raised by `text`, or {0, 0} if none.
std::pair<int, int> error_at(const std::string& text, std::string* message = nullptr) {
  try {
    parse_circuit(text);
  } catch (const ParseError& e) {
    if (message) *message = e.what();
    return {e.line(), e.column()};
  }
  return {0, 0};
}

}  // namespace

TEST(Parse, SingleCnot) {
  auto c = parse_circuit("qubits 2\nCNOT q0 q1");
  EXPECT_EQ(c.n_qubits, 2);
  ASSERT_EQ(c.ops.size(), 1u);
  EXPECT_EQ(c.ops[0].kind, GateKind::kCNOT);
  EXPECT_EQ(c.ops[0].operands, (std::vector<int>{0, 1}));
  EXPECT_EQ(c.ops[0].line, 2);
}

TEST(Parse, DuplicateOperand) {
  std::string msg;
  EXPECT_EQ(error_at("qubits 1\nCNOT q0 q0", &msg), std::make_pair(2, 9));
  EXPECT_NE(msg.find("duplicate operand"), std::string::npos);
}

TEST(Parse, GoldenTree) {
  auto c = parse_circuit(slurp(oracle::fixture("three_ops.iqc")));
  EXPECT_EQ(c.ops.size(), 3u);
  expect_golden("three_ops.parse.json", json_text(to_json(c)));
}

TEST(Parse, ErrorsCarryLocation) {
  struct Case {
    std::string text;
    int line, col;
    std::string needle;
  };
  const Case cases[] = {
      {"qubits 2\nFOO q0", 2, 1, "unknown gate 'FOO'"},
      {"qubits 2\n  X q0 q1", 2, 3, "X takes 1 qubit(s), got 2"},
      {"qubits 2\nCNOT q0", 2, 1, "CNOT takes 2 qubit(s), got 1"},
      {"qubits 2\nGLOBAL_MS q1", 2, 1, "at least 2"},
      {"qubits 2\nX q2", 2, 3, "qubit index 2 >= 2"},
      {"qubits 2\nRZ q0 1.2.3", 2, 7, "malformed number"},
      {"qubits 2\nRZ q0 inf", 2, 7, "malformed number"},
      {"qubits 2\nX qa", 2, 3, "malformed qubit"},
      {"qubits 2\nRZ q0", 2, 6, "needs an angle"},
      {"qubits 2\nH q0 0.5", 2, 6, "takes no angle"},
      {"qubits 2\nMS q0 q1 0.5 0.5", 2, 14, "unexpected"},
      {"# nothing\nX q0", 2, 1, "header first"},
      {"qubits 2\nqubits 3", 2, 1, "duplicate 'qubits' header"},
      {"qubits -1", 1, 8, "malformed"},
      {"", 1, 1, "missing 'qubits <n>' header"},
  };
  for (const auto& c : cases) {
    std::string msg;
    auto at = error_at(c.text, &msg);
    EXPECT_EQ(at, std::make_pair(c.line, c.col)) << c.text << " -> " << msg;
    EXPECT_NE(msg.find(c.needle), std::string::npos) << c.text << " -> " << msg;
  }
}

TEST(Parse, CommentsBlankLinesAndCrlf) {
  auto c = parse_circuit("\n# header next\r\nqubits 3 # three\r\n\r\nMEASURE q2\r\n  # done\n");
  EXPECT_EQ(c.n_qubits, 3);
  ASSERT_EQ(c.ops.size(), 1u);
  EXPECT_EQ(c.ops[0].kind, GateKind::kMeasure);
}

TEST(Parse, OptionalAngles) {
  auto c = parse_circuit("qubits 4\nMS q0 q1\nMS q0 q1 -0.25\nGLOBAL_MS q0 q1 q2 q3 1e-3\nGLOBAL_MS q3 q0");
  EXPECT_FALSE(c.ops[0].angle);
  EXPECT_EQ(*c.ops[1].angle, -0.25);
  EXPECT_EQ(*c.ops[2].angle, 1e-3);
  EXPECT_EQ(c.ops[3].operands, (std::vector<int>{3, 0}));
}

TEST(Text, RoundTripRandomCircuits) {
  Rng rng(17);
  const GateKind kinds[] = {GateKind::kX,   GateKind::kH,        GateKind::kRZ,     GateKind::kMS,
                            GateKind::kCNOT, GateKind::kGlobalMS, GateKind::kMeasure};
  for (int trial = 0; trial < 200; ++trial) {
    Circuit c;
    c.n_qubits = 2 + static_cast<int>(rng.below(10));
    const int n_ops = static_cast<int>(rng.below(30));
    for (int k = 0; k < n_ops; ++k) {
      GateOp op;
      op.kind = kinds[rng.below(7)];
      std::vector<int> qs(static_cast<std::size_t>(c.n_qubits));
      for (int q = 0; q < c.n_qubits; ++q) qs[q] = q;
      rng.shuffle(qs);
      int arity = 1;
      if (is_two_qubit(op.kind)) arity = 2;
      if (op.kind == GateKind::kGlobalMS) arity = 2 + static_cast<int>(rng.below(c.n_qubits - 1));
      op.operands.assign(qs.begin(), qs.begin() + arity);
      if (op.kind == GateKind::kRZ || ((op.kind == GateKind::kMS || op.kind == GateKind::kGlobalMS) &&
                                       rng.bernoulli(0.5))) {
        op.angle = (rng.uniform() - 0.5) * 20.0;
      }
      c.ops.push_back(op);
    }
    auto back = parse_circuit(to_text(c));
    EXPECT_EQ(back, c) << to_text(c);
    EXPECT_EQ(to_text(back), to_text(c));
  }
}

TEST(Text, GateNames) {
  EXPECT_STREQ(to_string(GateKind::kGlobalMS), "GLOBAL_MS");
  EXPECT_STREQ(to_string(GateKind::kSwap), "SWAP");
  EXPECT_TRUE(is_two_qubit(GateKind::kMS));
  EXPECT_FALSE(is_two_qubit(GateKind::kSwap));
  EXPECT_FALSE(is_two_qubit(GateKind::kGlobalMS));
}

TEST(Parse, FixtureSuiteParses) {
  for (const char* name : {"ring4.iqc", "two_cliques.iqc", "interleaved.iqc", "ghz8.iqc", "global.iqc",
                           "star7.iqc"}) {
    EXPECT_NO_THROW(parse_circuit(slurp(oracle::fixture(name)))) << name;
  }
}
