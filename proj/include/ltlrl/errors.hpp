#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ltlrl {

/// Malformed textual input. `line` is 1-based (0 when the input is a single
/// line); `column` is a 0-based offset into that line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Well-formed input that violates a model invariant.
class ValidationError : public std::runtime_error {
 public:
  enum class Kind {
    undeclared_atom,
    determinism,
    totality,
    bipartition,
    probability,
    structure,
    alphabet_mismatch,
    invalid_policy,
    epsilon_cycle,
  };

  ValidationError(Kind kind, const std::string& message);

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

const char* to_string(ValidationError::Kind kind) noexcept;

}  // namespace ltlrl
