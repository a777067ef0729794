#pragma once

#include <stdexcept>
#include <string>

namespace veronese {

// Base class for everything that can go wrong while evaluating fields,
// operators or residuals at a point.
class evaluation_error : public std::runtime_error {
  public:
    explicit evaluation_error(const std::string& what) : std::runtime_error(what) {}
};

// A function was evaluated outside its domain (ln of a nonpositive value,
// division by zero, ...).  Carries the offending value.
class domain_error : public evaluation_error {
  public:
    domain_error(const std::string& what, double offending)
        : evaluation_error(what + " (value " + std::to_string(offending) + ")"),
          value(offending)
    {}

    double value;
};

// A matrix that must be inverted is singular at the probe point.
class singular_error : public evaluation_error {
  public:
    explicit singular_error(const std::string& what) : evaluation_error(what) {}
};

// An iterative solver failed to converge.
class convergence_error : public evaluation_error {
  public:
    explicit convergence_error(const std::string& what) : evaluation_error(what) {}
};

// Text could not be parsed.  byte_offset points at the first offending byte;
// expected lists the token classes that would have been accepted there.
class parse_error : public std::runtime_error {
  public:
    parse_error(const std::string& what, std::size_t offset, std::string expected_tokens)
        : std::runtime_error(what + " at offset " + std::to_string(offset) +
                             " (expected: " + expected_tokens + ")"),
          byte_offset(offset),
          expected(std::move(expected_tokens))
    {}

    std::size_t byte_offset;
    std::string expected;
};

} // namespace veronese
