#pragma once

#include <stdexcept>
#include <string>

namespace prs {

// Malformed instance, formula, graph or file content.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A caller broke an operation's precondition (e.g. missing variable value).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// An exact computation would exceed its enumeration guard.
class EnumerationLimit : public std::length_error {
 public:
  using std::length_error::length_error;
};

// A sampler hit its round cap without halting.
class CapExceeded : public std::runtime_error {
 public:
  explicit CapExceeded(unsigned long long rounds)
      : std::runtime_error("round cap exceeded after " + std::to_string(rounds) + " rounds"),
        rounds_(rounds) {}
  unsigned long long rounds() const noexcept { return rounds_; }

 private:
  unsigned long long rounds_;
};

}  // namespace prs
