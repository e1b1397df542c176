#pragma once

#include <stdexcept>
#include <string>

namespace polyqs {

// Malformed or inconsistent input (bad matrix shape, degenerate triangle, ...).
class InputError : public std::invalid_argument {
public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// A documented precondition of an operation does not hold.
class PreconditionError : public std::runtime_error {
public:
  explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

// An iterative solver hit its iteration cap before reaching tolerance.
class NonConvergence : public std::runtime_error {
public:
  explicit NonConvergence(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace polyqs
