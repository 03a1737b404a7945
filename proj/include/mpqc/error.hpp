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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mpqc {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed QASM text. Carries the 1-based line and column of the offending
/// token.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t line, std::size_t column)
      : Error(
            "line " + std::to_string(line) + ", column " +
            std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Well-formed input that names a construct outside the supported subset.
class UnsupportedError : public Error {
 public:
  explicit UnsupportedError(const std::string& construct)
      : Error("unsupported construct: " + construct), construct_(construct) {}

  const std::string& construct() const { return construct_; }

 private:
  std::string construct_;
};

/// A value violates a documented invariant (probability range, operand
/// range, connectivity...).
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(what) {}
};

/// Orchestration could not find a conflict-free executable for a process.
class ConflictError : public Error {
 public:
  ConflictError(std::size_t process_index, const std::string& program)
      : Error(
            "no conflict-free executable for process " +
            std::to_string(process_index) + " (" + program + ")"),
        process_index_(process_index) {}

  std::size_t process_index() const { return process_index_; }

 private:
  std::size_t process_index_;
};

/// No combination of executables is conflict-free.
class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& what) : Error(what) {}
};

class TimeoutError : public Error {
 public:
  explicit TimeoutError(const std::string& what) : Error(what) {}
};

}  // namespace mpqc
