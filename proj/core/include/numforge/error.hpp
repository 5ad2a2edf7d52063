#pragma once

#include <stdexcept>
#include <string>

namespace numforge {

/// Coarse failure class, mapped onto process exit codes by the CLI.
enum class ErrorKind {
  kConfig,     // exit 2
  kInput,      // exit 3
  kNumerical,  // exit 4
  kInternal,   // exit 1
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::kConfig, what) {}
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ErrorKind::kInput, what) {}
};

/// A document lost every paragraph during preprocessing.
class DocumentEmptied : public InputError {
 public:
  explicit DocumentEmptied(std::string doc_id)
      : InputError("document emptied: " + doc_id), doc_id_(std::move(doc_id)) {}
  const std::string& doc_id() const noexcept { return doc_id_; }

 private:
  std::string doc_id_;
};

class InvalidCounts : public InputError {
 public:
  using InputError::InputError;
};

class StaleSpan : public InputError {
 public:
  using InputError::InputError;
};

class FormatError : public InputError {
 public:
  using InputError::InputError;
};

class ShapeError : public InputError {
 public:
  using InputError::InputError;
};

class LayerMismatch : public InputError {
 public:
  using InputError::InputError;
};

class InsufficientExemplars : public InputError {
 public:
  using InputError::InputError;
};

class MissingPrediction : public InputError {
 public:
  explicit MissingPrediction(std::string qid)
      : InputError("missing prediction for question " + qid), qid_(std::move(qid)) {}
  const std::string& qid() const noexcept { return qid_; }

 private:
  std::string qid_;
};

class InsufficientRange : public Error {
 public:
  explicit InsufficientRange(const std::string& what) : Error(ErrorKind::kNumerical, what) {}
};

class NumericalFailure : public Error {
 public:
  explicit NumericalFailure(const std::string& what) : Error(ErrorKind::kNumerical, what) {}
};

}  // namespace numforge
