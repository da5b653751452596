#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gibbslab {

enum class ErrorKind {
  kInvalidDistribution,
  kInvalidParameter,
  kEmptyCondition,
  kInstanceTooLarge,
  kInvalidInput,
  kTargetUnreachable,
  kMonotonicityUnavailable,
  kInternal,
};

std::string_view to_string(ErrorKind kind);

// Base of every domain error raised by the library. The CLI maps these to
// exit code 1 and a machine-readable JSON record.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace gibbslab
