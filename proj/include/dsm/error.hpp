#pragma once

#include <stdexcept>
#include <string>

namespace dsm {

enum class ErrorKind {
  DuplicateEdge,
  MissingEdge,
  MissingLabel,
  LabelConflict,
  SelfLoop,
  ParseError,
  UndeclaredVertex,
  UnknownVertex,
  NegativeComponent,
  DimensionMismatch,
  DegreeOutOfRange,
  InconsistentState,
  DegreeTooLarge,
  TooFewVertices,
  DegenerateVariance,
  InvalidConfig,
  InvalidParams,
  InvalidRate,
  Unsatisfiable,
};

const char* to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace dsm
