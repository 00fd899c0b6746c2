#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace strata {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed document text.
class SyntaxError : public Error {
 public:
  using Error::Error;
};

/// Well-formed document with a missing, unknown or mistyped field.
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& message)
      : Error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// One broken dataset invariant. `code` is machine-readable
/// (e.g. SELF_LOOP), `entity` names the offending id or relation triple.
struct Violation {
  std::string code;
  std::string entity;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Dataset invariants do not hold. Carries every violation found.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  std::vector<Violation> violations_;
};

class LimitError : public Error {
 public:
  using Error::Error;
};

/// Contradictory or malformed hierarchy specification.
class SpecError : public Error {
 public:
  using Error::Error;
};

class CycleError : public Error {
 public:
  explicit CycleError(std::vector<std::string> cycle);
  /// Person ids along the cycle; the last one links back to the first.
  const std::vector<std::string>& cycle() const noexcept { return cycle_; }

 private:
  std::vector<std::string> cycle_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  NumericalError(int tick, std::string node_id);
  int tick() const noexcept { return tick_; }
  const std::string& node_id() const noexcept { return node_id_; }

 private:
  int tick_;
  std::string node_id_;
};

class UnknownNodeError : public Error {
 public:
  explicit UnknownNodeError(std::string id)
      : Error("unknown person id '" + id + "'"), id_(std::move(id)) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

class TraceMissingError : public Error {
 public:
  TraceMissingError() : Error("layout was run without trace recording") {}
};

}  // namespace strata
