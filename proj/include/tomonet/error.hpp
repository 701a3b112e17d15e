#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tomonet {

enum class ErrorKind {
  NonSquare,
  NotHermitian,
  NotPSD,
  DimensionMismatch,
  InvalidArgument,
  ZeroTrace,
  RejectionExhausted,
  VersionMismatch,
  CorruptPayload,
  SelectionMismatch,
  Io,
  Config,
};

std::string_view to_string(ErrorKind kind);

/// Every failure in the library surfaces as this exception; `kind()` lets
/// callers (the CLI in particular) map failures to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace tomonet
