#pragma once

#include <stdexcept>
#include <string>

namespace ionfab {

// Base of every error raised by the library. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numeric argument outside the domain of a formula or constructor.
class DomainError : public Error {
 public:
  using Error::Error;
};

class UnknownSpecies : public Error {
 public:
  explicit UnknownSpecies(const std::string& name)
      : Error("unknown ion species '" + name + "'") {}
};

// Malformed input document: wrong type, missing or unknown key.
class SchemaError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Semantic invariant violated by an otherwise well-formed input.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Circuit text that does not follow the grammar; carries a 1-based location.
class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& message)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace ionfab
