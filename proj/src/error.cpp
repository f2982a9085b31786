#include "sway/error.hpp"

namespace sway {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedSvg: return "MalformedSvg";
    case ErrorCode::MissingViewBox: return "MissingViewBox";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::NonNumericAttribute: return "NonNumericAttribute";
    case ErrorCode::BudgetTooSmall: return "BudgetTooSmall";
    case ErrorCode::UnknownEasing: return "UnknownEasing";
    case ErrorCode::DegenerateLine: return "DegenerateLine";
    case ErrorCode::DegeneratePath: return "DegeneratePath";
    case ErrorCode::EmptyGroup: return "EmptyGroup";
    case ErrorCode::InvalidScheme: return "InvalidScheme";
    case ErrorCode::UnknownTrack: return "UnknownTrack";
    case ErrorCode::InvalidDuration: return "InvalidDuration";
    case ErrorCode::MissingAssignment: return "MissingAssignment";
    case ErrorCode::NoJsonFound: return "NoJsonFound";
    case ErrorCode::ClientError: return "ClientError";
    case ErrorCode::BusySession: return "BusySession";
    case ErrorCode::EmptyTimeline: return "EmptyTimeline";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::UnbakeableFeature: return "UnbakeableFeature";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::UnknownVersion: return "UnknownVersion";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace sway
