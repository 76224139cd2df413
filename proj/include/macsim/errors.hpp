#pragma once

#include <stdexcept>
#include <string>

namespace macsim {

// Bad inputs: rejected parameters, malformed scenarios, broken invariants
// supplied by the caller. CLI maps these to exit code 2.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of a formula (e.g. occupancy
// count above the number of contenders).
struct DomainError : ValidationError {
  using ValidationError::ValidationError;
};

// A request that cannot be satisfied by the configured capacity
// (e.g. more reserved packets than data slots in a frame).
struct CapacityError : ValidationError {
  using ValidationError::ValidationError;
};

// Scenario file syntax errors; carries the 1-based line number.
struct ParseError : std::runtime_error {
  ParseError(int line_number, const std::string& what)
      : std::runtime_error("line " + std::to_string(line_number) + ": " + what),
        line(line_number) {}
  int line;
};

// Protocol-level "no slot available this frame" outcome for compose_atim.
struct NoFreeSlotError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace macsim
