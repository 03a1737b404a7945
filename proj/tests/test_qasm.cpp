// Copyright 2026 The mpqc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <regex>
#include <sstream>

#include <catch_amalgamated.hpp>

#include "mpqc/qasm.hpp"
#include "test_util.hpp"

using namespace mpqc;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("one cnot statement", "[qasm]") {
  const auto c = parse_qasm("qreg q[2]; cx q[0],q[1];");
  CHECK(c.num_qubits() == 2);
  REQUIRE(c.size() == 1);
  CHECK(c.gates()[0] == make_cx(0, 1));
}

TEST_CASE("register without gates", "[qasm]") {
  const auto c = parse_qasm("qreg q[1];");
  CHECK(c.num_qubits() == 1);
  CHECK(c.empty());
}

TEST_CASE("header, include and comments are accepted", "[qasm]") {
  const auto c = parse_qasm(
      "OPENQASM 2.0;\n// comment\ninclude \"qelib1.inc\";\nqreg q[3];\ncreg c[3];\n"
      "h q[0]; // trailing\nmeasure q[0] -> c[2];\n");
  REQUIRE(c.size() == 2);
  CHECK(c.num_clbits() == 3);
  CHECK(c.gates()[1] == make_measure(0, 2));
}

TEST_CASE("parameter expressions", "[qasm]") {
  const auto c = parse_qasm(
      "qreg q[1]; rz(pi/2) q[0]; u3(-pi, 2*pi/4, (1+1)*0.25) q[0]; u1(-(pi)) q[0];");
  REQUIRE(c.size() == 3);
  CHECK(c.gates()[0].params[0] == Catch::Approx(M_PI / 2));
  CHECK(c.gates()[1].params[0] == Catch::Approx(-M_PI));
  CHECK(c.gates()[1].params[1] == Catch::Approx(M_PI / 2));
  CHECK(c.gates()[1].params[2] == Catch::Approx(0.5));
  CHECK(c.gates()[2].params[0] == Catch::Approx(-M_PI));
}

TEST_CASE("register broadcast and barrier", "[qasm]") {
  const auto c = parse_qasm("qreg q[3]; creg c[3]; h q; barrier q; measure q -> c;");
  CHECK(count_kind(c.gates(), GateKind::single_qubit) == 3);
  CHECK(count_kind(c.gates(), GateKind::barrier) == 1);
  CHECK(count_kind(c.gates(), GateKind::measure) == 3);
  const auto& bar = c.gates()[3];
  CHECK(bar.qubits == std::vector<int>{0, 1, 2});
}

TEST_CASE("swap is kept as its own kind", "[qasm]") {
  const auto c = parse_qasm("qreg q[2]; swap q[0],q[1];");
  REQUIRE(c.size() == 1);
  CHECK(c.gates()[0].op == OpCode::swap);
}

TEST_CASE("multiple classical registers are flattened in order", "[qasm]") {
  const auto c = parse_qasm(
      "qreg q[2]; creg a[1]; creg b[1]; measure q[0] -> b[0]; measure q[1] -> a[0];");
  CHECK(c.num_clbits() == 2);
  CHECK(c.gates()[0].clbit == 1);
  CHECK(c.gates()[1].clbit == 0);
}

TEST_CASE("syntax errors carry a position", "[qasm][errors]") {
  try {
    parse_qasm("qreg q[2];\ncx q[0] q[1];");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() > 1);
  }
  CHECK_THROWS_AS(parse_qasm("qreg q[2]; h q[0]"), ParseError);
  CHECK_THROWS_AS(parse_qasm("h q[0];"), ParseError);
}

TEST_CASE("unsupported constructs are named", "[qasm][errors]") {
  CHECK_THROWS_WITH(parse_qasm("qreg q[1]; creg c[1]; if(c==1) x q[0];"),
                    ContainsSubstring("if"));
  CHECK_THROWS_WITH(parse_qasm("qreg q[1]; gate foo a { x a; }"), ContainsSubstring("gate"));
  CHECK_THROWS_WITH(parse_qasm("qreg q[3]; ccx q[0],q[1],q[2];"), ContainsSubstring("ccx"));
  CHECK_THROWS_WITH(parse_qasm("qreg q[1]; reset q[0];"), ContainsSubstring("reset"));
  CHECK_THROWS_WITH(parse_qasm("qreg a[1]; qreg b[1];"),
                    ContainsSubstring("multiple quantum registers"));
  CHECK_THROWS_AS(parse_qasm("OPENQASM 3.0; qreg q[1];"), UnsupportedError);
}

TEST_CASE("operands out of range", "[qasm][errors]") {
  CHECK_THROWS_AS(parse_qasm("qreg q[2]; cx q[0],q[2];"), ParseError);
  CHECK_THROWS_AS(parse_qasm("qreg q[1]; creg c[1]; measure q[0] -> c[1];"), ParseError);
  CHECK_THROWS_AS(parse_qasm("qreg q[2]; cx q[1],q[1];"), ParseError);
}

TEST_CASE("adder_n4 gate counts match a statement count of the file", "[qasm][oracle]") {
  const auto path = test::benchmark_dir() / "adder_n4.qasm";
  const auto c = load_qasm(path.string());
  CHECK(c.num_qubits() == 4);
  CHECK(c.name() == "adder_n4");

  // Count statements by leading keyword with a regex, independently of the
  // parser. Every statement in the suite file addresses single qubits.
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  std::map<std::string, std::size_t> expected;
  const std::regex stmt(R"((^|\n)\s*([a-z0-9]+)(\([^)]*\))?\s+q\[)");
  for (auto it = std::sregex_iterator(text.begin(), text.end(), stmt); it != std::sregex_iterator();
       ++it) {
    ++expected[(*it)[2].str()];
  }
  expected.erase("qreg");
  std::map<std::string, std::size_t> actual;
  for (const auto& g : c.gates()) ++actual[std::string(op_name(g.op))];
  CHECK(actual == expected);
  CHECK(actual["cx"] == 10);
  CHECK(actual["measure"] == 4);
}

TEST_CASE("every suite program parses", "[qasm]") {
  std::ifstream list(test::benchmark_dir() / "suite.txt");
  std::string name;
  int count = 0;
  while (std::getline(list, name)) {
    const auto c = load_qasm((test::benchmark_dir() / (name + ".qasm")).string());
    CHECK(c.num_qubits() >= 2);
    CHECK(c.num_qubits() <= 10);
    CHECK(c.has_measurements());
    ++count;
  }
  CHECK(count == 30);
}

TEST_CASE("print and reparse is gate-for-gate identical", "[qasm][property]") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 6);
    const auto c = test::random_circuit(n, static_cast<int>(rng() % 30), rng, trial % 2 == 0);
    const auto again = parse_qasm(to_qasm(c));
    CHECK(again == c);
  }
  std::ifstream list(test::benchmark_dir() / "suite.txt");
  std::string name;
  while (std::getline(list, name)) {
    const auto c = load_qasm((test::benchmark_dir() / (name + ".qasm")).string());
    CHECK(parse_qasm(to_qasm(c), name) == c);
  }
}
