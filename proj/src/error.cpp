#include "tomonet/error.hpp"

namespace tomonet {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonSquare: return "NonSquare";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ZeroTrace: return "ZeroTrace";
    case ErrorKind::RejectionExhausted: return "RejectionExhausted";
    case ErrorKind::VersionMismatch: return "VersionMismatch";
    case ErrorKind::CorruptPayload: return "CorruptPayload";
    case ErrorKind::SelectionMismatch: return "SelectionMismatch";
    case ErrorKind::Io: return "Io";
    case ErrorKind::Config: return "Config";
  }
  return "Unknown";
}

}  // namespace tomonet
