#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gevrey {

/// Invalid parameters or malformed input documents. The message names the
/// offending parameter (and its JSON location when parsing).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A vector is outside the domain of an unbounded operator function.
/// `index()` is the spectral index at which the divergence was detected
/// (for derivative chains and order estimates it is the smallest failing
/// power instead).
class DomainError : public std::runtime_error {
 public:
  DomainError(const std::string& what, std::int64_t index)
      : std::runtime_error(what), index_(index) {}

  [[nodiscard]] std::int64_t index() const noexcept { return index_; }

 private:
  std::int64_t index_;
};

/// Raised by certificate checks when a synthesized counterexample turns out
/// to be a member of the class it was built to refute.
class ConstructionViolated : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace gevrey
