#include "flowsim/error.hpp"

namespace flowsim {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::MalformedImage: return "MalformedImage";
    case ErrorKind::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorKind::NotThinned: return "NotThinned";
    case ErrorKind::DegenerateShape: return "DegenerateShape";
    case ErrorKind::NotClosed: return "NotClosed";
    case ErrorKind::DegenerateMeasurement: return "DegenerateMeasurement";
    case ErrorKind::UnclassifiedShape: return "UnclassifiedShape";
    case ErrorKind::MalformedIndex: return "MalformedIndex";
    case ErrorKind::DuplicatePath: return "DuplicatePath";
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::LayoutInvalid: return "LayoutInvalid";
    case ErrorKind::MalformedReport: return "MalformedReport";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace flowsim
