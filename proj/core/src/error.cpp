#include "gibbslab/error.hpp"

namespace gibbslab {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidDistribution: return "InvalidDistribution";
    case ErrorKind::kInvalidParameter: return "InvalidParameter";
    case ErrorKind::kEmptyCondition: return "EmptyCondition";
    case ErrorKind::kInstanceTooLarge: return "InstanceTooLarge";
    case ErrorKind::kInvalidInput: return "InvalidInput";
    case ErrorKind::kTargetUnreachable: return "TargetUnreachable";
    case ErrorKind::kMonotonicityUnavailable: return "MonotonicityUnavailable";
    case ErrorKind::kInternal: return "InternalError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

}  // namespace gibbslab
