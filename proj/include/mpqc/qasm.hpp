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

// Reader and writer for the OpenQASM 2.0 subset used by the benchmark suite:
// one quantum register, any number of classical registers (flattened in
// declaration order), the qelib1 single-qubit gates u1/u2/u3/rx/ry/rz/h/x/y/z/
// s/t/sdg/tdg, cx, swap, barrier and end-of-program measurement.

#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mpqc/circuit.hpp"
#include "mpqc/error.hpp"

namespace mpqc {

namespace detail {

enum class TokKind { ident, number, string, symbol, arrow, end };

struct Token {
  TokKind kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space_and_comments();
      if (pos_ >= src_.size()) {
        out.push_back({TokKind::end, "", line_, col_});
        return out;
      }
      const std::size_t line = line_;
      const std::size_t col = col_;
      const char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string id;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                src_[pos_] == '_')) {
          id.push_back(advance());
        }
        out.push_back({TokKind::ident, std::move(id), line, col});
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        std::string num;
        while (pos_ < src_.size() &&
               (std::isdigit(static_cast<unsigned char>(src_[pos_])) ||
                src_[pos_] == '.')) {
          num.push_back(advance());
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
          num.push_back(advance());
          if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) {
            num.push_back(advance());
          }
          while (pos_ < src_.size() &&
                 std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
            num.push_back(advance());
          }
        }
        out.push_back({TokKind::number, std::move(num), line, col});
      } else if (c == '"') {
        advance();
        std::string s;
        while (pos_ < src_.size() && src_[pos_] != '"') s.push_back(advance());
        if (pos_ >= src_.size()) {
          throw ParseError("unterminated string literal", line, col);
        }
        advance();
        out.push_back({TokKind::string, std::move(s), line, col});
      } else if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
        advance();
        advance();
        out.push_back({TokKind::arrow, "->", line, col});
      } else if (std::string_view("[](){};,+-*/^=<>").find(c) !=
                 std::string_view::npos) {
        advance();
        out.push_back({TokKind::symbol, std::string(1, c), line, col});
      } else {
        throw ParseError(
            std::string("unexpected character '") + c + "'", line, col);
      }
    }
  }

 private:
  char advance() {
    const char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space_and_comments() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        return;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_{0};
  std::size_t line_{1};
  std::size_t col_{1};
};

struct ClassicalRegister {
  std::string name;
  int offset;
  int size;
};

class QasmParser {
 public:
  QasmParser(std::string_view text, std::string name)
      : toks_(Lexer(text).run()), name_(std::move(name)) {}

  Circuit parse() {
    // Registers must be declared before use, but a creg may follow the qreg
    // and gates, so statements are collected first and applied once all
    // declarations are known.
    if (peek().kind == TokKind::ident && peek().text == "OPENQASM") {
      next();
      const Token v = expect(TokKind::number, "version number");
      if (v.text != "2.0" && v.text != "2") {
        throw UnsupportedError("OPENQASM version " + v.text);
      }
      expect_symbol(";");
    }
    while (peek().kind != TokKind::end) statement();
    if (!qreg_declared_) {
      throw ParseError("missing qreg declaration", peek().line, peek().column);
    }
    Circuit c(name_, qreg_size_, num_clbits_);
    for (auto& [gate, tok] : pending_) {
      try {
        c.add(std::move(gate));
      } catch (const ValidationError& e) {
        throw ParseError(e.what(), tok.line, tok.column);
      }
    }
    return c;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  Token next() { return toks_[pos_++]; }

  [[noreturn]] void fail(const std::string& msg, const Token& at) const {
    throw ParseError(msg, at.line, at.column);
  }

  Token expect(TokKind kind, const char* what) {
    if (peek().kind != kind) {
      fail(std::string("expected ") + what + ", found '" + peek().text + "'",
           peek());
    }
    return next();
  }

  void expect_symbol(const char* sym) {
    if (peek().kind != TokKind::symbol || peek().text != sym) {
      fail(std::string("expected '") + sym + "', found '" + peek().text + "'",
           peek());
    }
    next();
  }

  bool accept_symbol(const char* sym) {
    if (peek().kind == TokKind::symbol && peek().text == sym) {
      next();
      return true;
    }
    return false;
  }

  void statement() {
    const Token head = expect(TokKind::ident, "statement");
    const std::string& kw = head.text;
    if (kw == "include") {
      expect(TokKind::string, "include path");
      expect_symbol(";");
    } else if (kw == "qreg") {
      if (qreg_declared_) throw UnsupportedError("multiple quantum registers");
      qreg_name_ = expect(TokKind::ident, "register name").text;
      qreg_size_ = register_size();
      qreg_declared_ = true;
      expect_symbol(";");
    } else if (kw == "creg") {
      const std::string name = expect(TokKind::ident, "register name").text;
      const int size = register_size();
      cregs_.push_back({name, num_clbits_, size});
      num_clbits_ += size;
      expect_symbol(";");
    } else if (kw == "measure") {
      measure(head);
    } else if (kw == "barrier") {
      barrier(head);
    } else if (kw == "if") {
      throw UnsupportedError("classically controlled 'if'");
    } else if (kw == "gate" || kw == "opaque" || kw == "reset") {
      throw UnsupportedError("'" + kw + "' statement");
    } else {
      gate_statement(head);
    }
  }

  int register_size() {
    expect_symbol("[");
    const Token n = expect(TokKind::number, "register size");
    expect_symbol("]");
    const int size = std::atoi(n.text.c_str());
    if (size <= 0 || n.text.find('.') != std::string::npos) {
      fail("register size must be a positive integer", n);
    }
    return size;
  }

  // A qubit argument: either q[i] or the whole register q.
  std::vector<int> qubit_arg() {
    const Token reg = expect(TokKind::ident, "qubit register");
    if (!qreg_declared_ || reg.text != qreg_name_) {
      fail("unknown quantum register '" + reg.text + "'", reg);
    }
    if (accept_symbol("[")) {
      const Token idx = expect(TokKind::number, "qubit index");
      expect_symbol("]");
      const int i = std::atoi(idx.text.c_str());
      if (i < 0 || i >= qreg_size_) {
        fail("qubit index " + idx.text + " out of range for " + qreg_name_ +
                 "[" + std::to_string(qreg_size_) + "]",
             idx);
      }
      return {i};
    }
    std::vector<int> all(static_cast<std::size_t>(qreg_size_));
    for (int i = 0; i < qreg_size_; ++i) all[static_cast<std::size_t>(i)] = i;
    return all;
  }

  std::vector<int> clbit_arg() {
    const Token reg = expect(TokKind::ident, "classical register");
    const ClassicalRegister* found = nullptr;
    for (const auto& r : cregs_) {
      if (r.name == reg.text) found = &r;
    }
    if (found == nullptr) {
      fail("unknown classical register '" + reg.text + "'", reg);
    }
    if (accept_symbol("[")) {
      const Token idx = expect(TokKind::number, "bit index");
      expect_symbol("]");
      const int i = std::atoi(idx.text.c_str());
      if (i < 0 || i >= found->size) {
        fail("bit index " + idx.text + " out of range for " + found->name, idx);
      }
      return {found->offset + i};
    }
    std::vector<int> all;
    for (int i = 0; i < found->size; ++i) all.push_back(found->offset + i);
    return all;
  }

  void measure(const Token& head) {
    const auto qs = qubit_arg();
    expect(TokKind::arrow, "'->'");
    const auto cs = clbit_arg();
    expect_symbol(";");
    if (qs.size() != cs.size()) fail("measure register size mismatch", head);
    for (std::size_t i = 0; i < qs.size(); ++i) {
      pending_.push_back({make_measure(qs[i], cs[i]), head});
    }
  }

  void barrier(const Token& head) {
    std::vector<int> span;
    do {
      const auto qs = qubit_arg();
      span.insert(span.end(), qs.begin(), qs.end());
    } while (accept_symbol(","));
    expect_symbol(";");
    std::sort(span.begin(), span.end());
    span.erase(std::unique(span.begin(), span.end()), span.end());
    pending_.push_back({make_gate(OpCode::barrier, std::move(span)), head});
  }

  void gate_statement(const Token& head) {
    const auto op = op_from_name(head.text);
    if (!op || *op == OpCode::measure || *op == OpCode::barrier) {
      throw UnsupportedError("gate '" + head.text + "'");
    }
    std::vector<double> params;
    if (accept_symbol("(")) {
      if (!accept_symbol(")")) {
        do {
          params.push_back(expression());
        } while (accept_symbol(","));
        expect_symbol(")");
      }
    }
    if (static_cast<int>(params.size()) != op_num_params(*op)) {
      fail(head.text + " expects " + std::to_string(op_num_params(*op)) +
               " parameter(s)",
           head);
    }
    std::vector<std::vector<int>> args;
    do {
      args.push_back(qubit_arg());
    } while (accept_symbol(","));
    expect_symbol(";");

    const bool two = *op == OpCode::cx || *op == OpCode::swap;
    if (args.size() != (two ? 2U : 1U)) {
      fail(head.text + " has wrong number of operands", head);
    }
    if (!two) {
      for (int q : args[0]) pending_.push_back({make_gate(*op, {q}, params), head});
      return;
    }
    // Register broadcast: q,r pairs elementwise; a single index pairs with
    // every element of the other argument.
    const std::size_t n = std::max(args[0].size(), args[1].size());
    if ((args[0].size() != 1 && args[0].size() != n) ||
        (args[1].size() != 1 && args[1].size() != n)) {
      fail("operand register size mismatch", head);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const int a = args[0].size() == 1 ? args[0][0] : args[0][i];
      const int b = args[1].size() == 1 ? args[1][0] : args[1][i];
      if (a == b) fail(head.text + " operands must be distinct", head);
      pending_.push_back({make_gate(*op, {a, b}), head});
    }
  }

  // expr := term (('+'|'-') term)*
  double expression() {
    double v = term();
    while (true) {
      if (accept_symbol("+")) {
        v += term();
      } else if (accept_symbol("-")) {
        v -= term();
      } else {
        return v;
      }
    }
  }

  double term() {
    double v = unary();
    while (true) {
      if (accept_symbol("*")) {
        v *= unary();
      } else if (accept_symbol("/")) {
        const Token at = peek();
        const double d = unary();
        if (d == 0.0) fail("division by zero", at);
        v /= d;
      } else {
        return v;
      }
    }
  }

  double unary() {
    if (accept_symbol("-")) return -unary();
    if (accept_symbol("+")) return unary();
    return primary();
  }

  double primary() {
    const Token t = next();
    if (t.kind == TokKind::number) return std::strtod(t.text.c_str(), nullptr);
    if (t.kind == TokKind::ident && t.text == "pi") return std::numbers::pi;
    if (t.kind == TokKind::symbol && t.text == "(") {
      const double v = expression();
      expect_symbol(")");
      return v;
    }
    if (t.kind == TokKind::ident) {
      throw UnsupportedError("expression term '" + t.text + "'");
    }
    fail("malformed parameter expression at '" + t.text + "'", t);
  }

  std::vector<Token> toks_;
  std::size_t pos_{0};
  std::string name_;
  bool qreg_declared_{false};
  std::string qreg_name_;
  int qreg_size_{0};
  std::vector<ClassicalRegister> cregs_;
  int num_clbits_{0};
  std::vector<std::pair<Gate, Token>> pending_;
};

inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Parses OpenQASM 2.0 text. Throws ParseError for malformed or out-of-range
/// input and UnsupportedError for constructs outside the subset.
inline Circuit parse_qasm(std::string_view text, std::string name = "circuit") {
  return detail::QasmParser(text, std::move(name)).parse();
}

inline Circuit load_qasm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  auto stem = path.substr(path.find_last_of('/') + 1);
  if (const auto dot = stem.rfind(".qasm"); dot != std::string::npos) {
    stem.resize(dot);
  }
  return parse_qasm(ss.str(), stem);
}

/// Canonical serialization: one register `q`, one register `c`, one statement
/// per line, parameters printed with round-trip precision.
inline std::string to_qasm(const Circuit& c) {
  std::string out = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";
  out += "qreg q[" + std::to_string(c.num_qubits()) + "];\n";
  if (c.num_clbits() > 0) {
    out += "creg c[" + std::to_string(c.num_clbits()) + "];\n";
  }
  auto qarg = [](int q) { return "q[" + std::to_string(q) + "]"; };
  for (const auto& g : c.gates()) {
    if (g.op == OpCode::measure) {
      out += "measure " + qarg(g.qubits[0]) + " -> c[" +
             std::to_string(g.clbit) + "];\n";
      continue;
    }
    out += op_name(g.op);
    if (!g.params.empty()) {
      out += "(";
      for (std::size_t i = 0; i < g.params.size(); ++i) {
        if (i) out += ",";
        out += detail::format_real(g.params[i]);
      }
      out += ")";
    }
    for (std::size_t i = 0; i < g.qubits.size(); ++i) {
      out += i ? "," : " ";
      out += qarg(g.qubits[i]);
    }
    if (g.op == OpCode::barrier && g.qubits.empty()) out += " q";
    out += ";\n";
  }
  return out;
}

}  // namespace mpqc
