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

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mpqc/error.hpp"

namespace mpqc {

enum class OpCode : std::uint8_t {
  u1,
  u2,
  u3,
  rx,
  ry,
  rz,
  h,
  x,
  y,
  z,
  s,
  t,
  sdg,
  tdg,
  cx,
  swap,
  measure,
  barrier,
};

enum class GateKind : std::uint8_t { single_qubit, cnot, swap, measure, barrier };

namespace detail {

struct OpInfo {
  OpCode op;
  std::string_view name;
  int num_params;
};

inline constexpr std::array<OpInfo, 18> kOpTable{{
    {OpCode::u1, "u1", 1},
    {OpCode::u2, "u2", 2},
    {OpCode::u3, "u3", 3},
    {OpCode::rx, "rx", 1},
    {OpCode::ry, "ry", 1},
    {OpCode::rz, "rz", 1},
    {OpCode::h, "h", 0},
    {OpCode::x, "x", 0},
    {OpCode::y, "y", 0},
    {OpCode::z, "z", 0},
    {OpCode::s, "s", 0},
    {OpCode::t, "t", 0},
    {OpCode::sdg, "sdg", 0},
    {OpCode::tdg, "tdg", 0},
    {OpCode::cx, "cx", 0},
    {OpCode::swap, "swap", 0},
    {OpCode::measure, "measure", 0},
    {OpCode::barrier, "barrier", 0},
}};

}  // namespace detail

inline std::string_view op_name(OpCode op) {
  return detail::kOpTable[static_cast<std::size_t>(op)].name;
}

inline int op_num_params(OpCode op) {
  return detail::kOpTable[static_cast<std::size_t>(op)].num_params;
}

inline std::optional<OpCode> op_from_name(std::string_view name) {
  for (const auto& info : detail::kOpTable) {
    if (info.name == name) return info.op;
  }
  return std::nullopt;
}

inline GateKind kind_of(OpCode op) {
  switch (op) {
    case OpCode::cx:
      return GateKind::cnot;
    case OpCode::swap:
      return GateKind::swap;
    case OpCode::measure:
      return GateKind::measure;
    case OpCode::barrier:
      return GateKind::barrier;
    default:
      return GateKind::single_qubit;
  }
}

/// One operation of a gate list. Operands index qubits of whatever space the
/// list lives in: logical qubits in a Circuit, physical qubits in a routed
/// executable.
struct Gate {
  OpCode op{OpCode::barrier};
  std::vector<int> qubits;
  std::vector<double> params;
  int clbit{-1};  // measure target, -1 otherwise

  GateKind kind() const { return kind_of(op); }
  bool is_two_qubit() const {
    return op == OpCode::cx || op == OpCode::swap;
  }

  friend bool operator==(const Gate&, const Gate&) = default;
};

inline Gate make_gate(OpCode op, std::vector<int> qubits,
                      std::vector<double> params = {}) {
  return Gate{op, std::move(qubits), std::move(params), -1};
}

inline Gate make_cx(int control, int target) {
  return make_gate(OpCode::cx, {control, target});
}

inline Gate make_measure(int qubit, int clbit) {
  return Gate{OpCode::measure, {qubit}, {}, clbit};
}

/// Gate-list program over logical qubits. Every gate added is checked against
/// the arity, operand-range and end-measurement invariants.
class Circuit {
 public:
  Circuit() = default;
  Circuit(std::string name, int num_qubits, int num_clbits = 0)
      : name_(std::move(name)),
        num_qubits_(num_qubits),
        num_clbits_(num_clbits),
        measured_(static_cast<std::size_t>(std::max(num_qubits, 0)), false) {
    if (num_qubits < 0 || num_clbits < 0) {
      throw ValidationError("register sizes must be non-negative");
    }
  }

  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }
  int num_qubits() const { return num_qubits_; }
  int num_clbits() const { return num_clbits_; }
  const std::vector<Gate>& gates() const { return gates_; }
  std::size_t size() const { return gates_.size(); }
  bool empty() const { return gates_.empty(); }

  bool has_measurements() const {
    return std::any_of(gates_.begin(), gates_.end(), [](const Gate& g) {
      return g.op == OpCode::measure;
    });
  }

  void add(Gate gate) {
    check(gate);
    if (gate.op == OpCode::measure) {
      measured_[static_cast<std::size_t>(gate.qubits[0])] = true;
    }
    gates_.push_back(std::move(gate));
  }

  Circuit& cx(int c, int t) {
    add(make_cx(c, t));
    return *this;
  }
  Circuit& swap(int a, int b) {
    add(make_gate(OpCode::swap, {a, b}));
    return *this;
  }
  Circuit& apply(OpCode op, int q, std::vector<double> params = {}) {
    add(make_gate(op, {q}, std::move(params)));
    return *this;
  }
  Circuit& measure(int q, int c) {
    add(make_measure(q, c));
    return *this;
  }
  Circuit& barrier(std::vector<int> qubits) {
    add(make_gate(OpCode::barrier, std::move(qubits)));
    return *this;
  }

  friend bool operator==(const Circuit& a, const Circuit& b) {
    return a.num_qubits_ == b.num_qubits_ && a.num_clbits_ == b.num_clbits_ &&
           a.gates_ == b.gates_;
  }

 private:
  void check(const Gate& gate) const {
    const auto arity = gate.qubits.size();
    switch (gate.kind()) {
      case GateKind::cnot:
      case GateKind::swap:
        if (arity != 2 || gate.qubits[0] == gate.qubits[1]) {
          throw ValidationError(
              std::string(op_name(gate.op)) +
              " needs two distinct operands");
        }
        break;
      case GateKind::single_qubit:
      case GateKind::measure:
        if (arity != 1) {
          throw ValidationError(
              std::string(op_name(gate.op)) + " needs exactly one operand");
        }
        break;
      case GateKind::barrier:
        break;
    }
    if (static_cast<int>(gate.params.size()) != op_num_params(gate.op)) {
      throw ValidationError(
          std::string(op_name(gate.op)) + " expects " +
          std::to_string(op_num_params(gate.op)) + " parameter(s)");
    }
    for (int q : gate.qubits) {
      if (q < 0 || q >= num_qubits_) {
        throw ValidationError(
            "qubit operand " + std::to_string(q) + " out of range [0, " +
            std::to_string(num_qubits_) + ")");
      }
    }
    if (gate.op == OpCode::measure) {
      if (gate.clbit < 0 || gate.clbit >= num_clbits_) {
        throw ValidationError(
            "classical bit " + std::to_string(gate.clbit) + " out of range");
      }
      return;
    }
    if (gate.op == OpCode::barrier) return;
    for (int q : gate.qubits) {
      if (measured_[static_cast<std::size_t>(q)]) {
        throw ValidationError(
            "gate " + std::string(op_name(gate.op)) + " on qubit " +
            std::to_string(q) + " after its measurement");
      }
    }
  }

  std::string name_;
  int num_qubits_{0};
  int num_clbits_{0};
  std::vector<Gate> gates_;
  std::vector<bool> measured_;
};

/// Longest dependency chain of a gate list over `num_qubits` wires. Gates
/// conflict iff they share an operand; a barrier occupies one layer on every
/// qubit it spans.
inline int gate_list_depth(std::span<const Gate> gates, int num_qubits) {
  std::vector<int> level(static_cast<std::size_t>(num_qubits), 0);
  int depth = 0;
  for (const auto& g : gates) {
    int l = 0;
    for (int q : g.qubits) l = std::max(l, level[static_cast<std::size_t>(q)]);
    ++l;
    for (int q : g.qubits) level[static_cast<std::size_t>(q)] = l;
    depth = std::max(depth, l);
  }
  return depth;
}

inline int circuit_depth(const Circuit& c) {
  return gate_list_depth(c.gates(), c.num_qubits());
}

inline std::size_t count_kind(std::span<const Gate> gates, GateKind kind) {
  return static_cast<std::size_t>(std::count_if(
      gates.begin(), gates.end(),
      [kind](const Gate& g) { return g.kind() == kind; }));
}

/// Appends the three-CNOT expansion of swap(a, b).
inline void append_swap_as_cnots(std::vector<Gate>& out, int a, int b) {
  out.push_back(make_cx(a, b));
  out.push_back(make_cx(b, a));
  out.push_back(make_cx(a, b));
}

/// Copy of `c` with every swap expanded to three CNOTs.
inline Circuit decompose_swaps(const Circuit& c) {
  Circuit out(c.name(), c.num_qubits(), c.num_clbits());
  std::vector<Gate> expanded;
  for (const auto& g : c.gates()) {
    if (g.op == OpCode::swap) {
      expanded.clear();
      append_swap_as_cnots(expanded, g.qubits[0], g.qubits[1]);
      for (auto& e : expanded) out.add(std::move(e));
    } else {
      out.add(g);
    }
  }
  return out;
}

/// Number of two-qubit interactions between each pair of logical qubits,
/// as a dense symmetric matrix.
inline std::vector<std::vector<int>> interaction_counts(const Circuit& c) {
  const auto n = static_cast<std::size_t>(c.num_qubits());
  std::vector<std::vector<int>> counts(n, std::vector<int>(n, 0));
  for (const auto& g : c.gates()) {
    if (!g.is_two_qubit()) continue;
    const auto a = static_cast<std::size_t>(g.qubits[0]);
    const auto b = static_cast<std::size_t>(g.qubits[1]);
    ++counts[a][b];
    ++counts[b][a];
  }
  return counts;
}

}  // namespace mpqc
