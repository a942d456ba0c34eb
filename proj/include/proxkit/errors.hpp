#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace proxkit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class AdmissibilityError : public Error {
 public:
  using Error::Error;
};

class UnsupportedConjugate : public Error {
 public:
  using Error::Error;
};

class UnsupportedDimension : public Error {
 public:
  using Error::Error;
};

class RegistryError : public Error {
 public:
  using Error::Error;
};

// Malformed configuration. `field` is a JSON pointer to the offending value
// (empty for syntax errors); line and column are 1-based, 0 when unknown.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
  ConfigError(const std::string& what, std::string field, int line = 0, int column = 0)
      : Error(what), field_(std::move(field)), line_(line), column_(column) {}

  const std::string& field() const { return field_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  std::string field_;
  int line_ = 0;
  int column_ = 0;
};

}  // namespace proxkit
