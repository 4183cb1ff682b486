#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bfcnn {

// Bad network structure: unknown species, dimension mismatch, name clash.
struct StructuralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Text input that cannot be parsed. line is 1-based, 0 when unknown.
struct ParseError : std::runtime_error {
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line(line) {}
  std::size_t line;
};

// A configuration that violates a module precondition.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace bfcnn
