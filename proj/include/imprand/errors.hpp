#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace imprand {

// Base of every exception thrown by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (p outside [0,1], ...).
class domain_error : public error {
 public:
  using error::error;
};

// Builder parameters that violate a construction precondition.
class parameter_error : public error {
 public:
  using error::error;
};

// A process broke a contract it declared (negative multiplier, violated
// supermartingale inequality, strategy aimed at the wrong system).
class contract_violation : public error {
 public:
  using error::error;
};

// Request exceeds an exhaustion limit or needs more data than was supplied.
class resource_error : public error {
 public:
  using error::error;
};

class parse_error : public error {
 public:
  parse_error(const std::string& what, std::size_t offset)
      : error(what + " (offset " + std::to_string(offset) + ")"), offset_(offset) {}
  parse_error(const std::string& what, std::size_t line, std::size_t column)
      : error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
        offset_(0),
        line_(line),
        column_(column) {}

  std::size_t offset() const noexcept { return offset_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t offset_ = 0;
  std::size_t line_ = 0;
  std::size_t column_ = 0;
};

}  // namespace imprand
