#ifndef SECTIONVIEW_ERRORS_H_
#define SECTIONVIEW_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace sectionview {

// Root of every error the engine raises. `code()` is a short machine-readable
// tag used by the HTTP layer.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

// Malformed CSV input. `row` is the 1-based physical record number (the
// header is record 1).
class ParseError : public Error {
 public:
  ParseError(std::size_t row, const std::string& message)
      : Error("parse_error", "row " + std::to_string(row) + ": " + message),
        row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& message)
      : Error("schema_error", message) {}
};

class UnknownVariable : public Error {
 public:
  explicit UnknownVariable(const std::string& name)
      : Error("unknown_variable", "unknown variable '" + name + "'"),
        name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

// Inputs that violate a documented invariant (overlapping variables, bad
// levels, incomplete condition points, ...).
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message)
      : Error("invalid", message) {}
};

class TypeError : public Error {
 public:
  explicit TypeError(const std::string& message)
      : Error("type_error", message) {}
};

// Formula syntax error; `offset` is the byte offset into the formula text.
class FormulaError : public Error {
 public:
  FormulaError(std::size_t offset, const std::string& message)
      : Error("formula_error",
              message + " at offset " + std::to_string(offset)),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class FitError : public Error {
 public:
  FitError(const std::string& message, std::vector<std::string> columns = {})
      : Error("fit_error", message), columns_(std::move(columns)) {}
  // Design columns implicated in a rank deficiency.
  const std::vector<std::string>& columns() const { return columns_; }

 private:
  std::vector<std::string> columns_;
};

class ExternalModelError : public Error {
 public:
  ExternalModelError(std::string endpoint, int status,
                     const std::string& message)
      : Error("external_model_error",
              endpoint + ": " + message +
                  (status > 0 ? " (HTTP " + std::to_string(status) + ")"
                              : std::string())),
        endpoint_(std::move(endpoint)),
        status_(status) {}
  const std::string& endpoint() const { return endpoint_; }
  // HTTP status, or 0 when no response was received.
  int status() const { return status_; }

 private:
  std::string endpoint_;
  int status_;
};

// A section whose response/predictor type combination has no display.
class UnsupportedSection : public Error {
 public:
  explicit UnsupportedSection(const std::string& message)
      : Error("unsupported_section", message) {}
};

// A model failed while evaluating a section.
class ModelFailure : public Error {
 public:
  ModelFailure(std::string model, bool external, const std::string& message)
      : Error("model_failure", "model '" + model + "': " + message),
        model_(std::move(model)),
        external_(external) {}
  const std::string& model() const { return model_; }
  bool external() const { return external_; }

 private:
  std::string model_;
  bool external_;
};

}  // namespace sectionview

#endif  // SECTIONVIEW_ERRORS_H_
