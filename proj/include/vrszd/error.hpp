#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace vrszd {

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised before the evaluation that would overrun the budget starts.
class BudgetExhausted : public std::runtime_error {
 public:
  BudgetExhausted(std::uint64_t requested, std::uint64_t remaining)
      : std::runtime_error("evaluation budget exhausted: requested " +
                           std::to_string(requested) + ", remaining " +
                           std::to_string(remaining)),
        requested_(requested),
        remaining_(remaining) {}

  std::uint64_t requested() const noexcept { return requested_; }
  std::uint64_t remaining() const noexcept { return remaining_; }

 private:
  std::uint64_t requested_;
  std::uint64_t remaining_;
};

class DegenerateInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace vrszd
