#pragma once

#include <stdexcept>
#include <string>

namespace locopt {

// Two nodes share a position, so no bearing is defined.
class DegenerateGeometry : public std::domain_error {
 public:
  explicit DegenerateGeometry(const std::string& what) : std::domain_error(what) {}
};

// Sizes of inputs that have to agree do not.
class DimensionMismatch : public std::invalid_argument {
 public:
  explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

// A requirement cannot be met by any finite allocation.
class InfeasibleRequirement : public std::runtime_error {
 public:
  explicit InfeasibleRequirement(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace locopt
