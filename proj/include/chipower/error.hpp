#pragma once

#include <stdexcept>
#include <string>

namespace coda {

// Invalid or inconsistent input data: parse failures, violated
// preconditions, malformed matrices. CLI maps this to exit code 2.
class data_error : public std::runtime_error {
  public:
    explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

// Failures of the numerical machinery itself (non-finite input to a
// decomposition, rank-deficient design, ...). CLI maps this to exit code 3.
class numerical_error : public std::runtime_error {
  public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace coda
