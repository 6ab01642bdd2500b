#include "ltlrl/errors.hpp"

#include <fmt/format.h>

namespace ltlrl {

namespace {

std::string locate(const std::string& message, std::size_t line, std::size_t column) {
  if (line == 0) return fmt::format("{} (at offset {})", message, column);
  return fmt::format("line {}: {}", line, message);
}

}  // namespace

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error(locate(message, line, column)), line_(line), column_(column) {}

ValidationError::ValidationError(Kind kind, const std::string& message)
    : std::runtime_error(fmt::format("{} error: {}", to_string(kind), message)), kind_(kind) {}

const char* to_string(ValidationError::Kind kind) noexcept {
  switch (kind) {
    case ValidationError::Kind::undeclared_atom: return "undeclared-atom";
    case ValidationError::Kind::determinism: return "determinism";
    case ValidationError::Kind::totality: return "totality";
    case ValidationError::Kind::bipartition: return "bipartition";
    case ValidationError::Kind::probability: return "probability";
    case ValidationError::Kind::structure: return "structure";
    case ValidationError::Kind::alphabet_mismatch: return "alphabet-mismatch";
    case ValidationError::Kind::invalid_policy: return "invalid-policy";
    case ValidationError::Kind::epsilon_cycle: return "epsilon-cycle";
  }
  return "validation";
}

}  // namespace ltlrl
