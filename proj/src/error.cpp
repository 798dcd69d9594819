#include "dsm/error.hpp"

namespace dsm {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DuplicateEdge: return "DuplicateEdge";
    case ErrorKind::MissingEdge: return "MissingEdge";
    case ErrorKind::MissingLabel: return "MissingLabel";
    case ErrorKind::LabelConflict: return "LabelConflict";
    case ErrorKind::SelfLoop: return "SelfLoop";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UndeclaredVertex: return "UndeclaredVertex";
    case ErrorKind::UnknownVertex: return "UnknownVertex";
    case ErrorKind::NegativeComponent: return "NegativeComponent";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DegreeOutOfRange: return "DegreeOutOfRange";
    case ErrorKind::InconsistentState: return "InconsistentState";
    case ErrorKind::DegreeTooLarge: return "DegreeTooLarge";
    case ErrorKind::TooFewVertices: return "TooFewVertices";
    case ErrorKind::DegenerateVariance: return "DegenerateVariance";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::InvalidRate: return "InvalidRate";
    case ErrorKind::Unsatisfiable: return "Unsatisfiable";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace dsm
