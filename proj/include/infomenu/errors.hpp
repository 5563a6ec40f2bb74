#pragma once

#include <stdexcept>
#include <string>

namespace infomenu {

// Input outside a function's mathematical domain (zero-probability signal,
// posterior on the wrong side of the prior, negative density, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Operation requires a smooth value function but was handed an action table.
class UnsupportedKind : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A bracketed root search found no sign change. `equation()` names the
// equation that was being solved.
class RootNotBracketed : public std::runtime_error {
 public:
  RootNotBracketed(std::string equation, const std::string& detail)
      : std::runtime_error(equation + ": no sign change in bracket (" + detail + ")"),
        equation_(std::move(equation)) {}
  const std::string& equation() const noexcept { return equation_; }

 private:
  std::string equation_;
};

}  // namespace infomenu
