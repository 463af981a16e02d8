#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace absum {

// Failures of a computation on valid input (overflow, margin or truncation
// failures). Bad input is reported with std::invalid_argument instead.
class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OverflowError : public ComputationError {
 public:
  OverflowError(const std::string& what, std::uint64_t where)
      : ComputationError(what + " (at " + std::to_string(where) + ")"), where_(where) {}

  // Index, exponent or n at which the integer width was exceeded.
  std::uint64_t where() const noexcept { return where_; }

 private:
  std::uint64_t where_;
};

// Raised by a single sieve pass when max a(n) over the range exceeds the
// lookahead margin; carries the observed A(x) so the caller can re-run.
class MarginExceeded : public ComputationError {
 public:
  MarginExceeded(std::uint64_t observed, std::uint64_t margin)
      : ComputationError("shift margin " + std::to_string(margin) +
                         " smaller than observed A(x) = " + std::to_string(observed)),
        observed_(observed) {}

  std::uint64_t observed() const noexcept { return observed_; }

 private:
  std::uint64_t observed_;
};

}  // namespace absum
