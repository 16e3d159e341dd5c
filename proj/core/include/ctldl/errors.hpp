#pragma once

#include <stdexcept>
#include <string>

namespace ctldl {

// Malformed textual input (formulas, programs, structures, fact files).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, int line, int column)
      : std::runtime_error(std::move(message)), line_(line), column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Structurally well-formed input that violates an operation's contract
// (non-total structure, atom outside the declared set, unsafe rule, ...).
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& message) : std::runtime_error(message) {}
};

// A broken internal invariant; reaching this is a bug, not a user error.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& message) : std::logic_error(message) {}
};

}  // namespace ctldl
