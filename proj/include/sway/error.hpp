#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sway {

enum class ErrorCode {
  MalformedSvg,
  MissingViewBox,
  DegenerateGeometry,
  NonNumericAttribute,
  BudgetTooSmall,
  UnknownEasing,
  DegenerateLine,
  DegeneratePath,
  EmptyGroup,
  InvalidScheme,
  UnknownTrack,
  InvalidDuration,
  MissingAssignment,
  NoJsonFound,
  ClientError,
  BusySession,
  EmptyTimeline,
  UnsupportedVersion,
  SchemaViolation,
  UnbakeableFeature,
  UnknownSession,
  UnknownVersion,
  Io,
};

std::string_view to_string(ErrorCode code);

// All engine failures surface as this exception; `detail` carries the
// machine-usable part (an XML position, a JSON path, a feature list).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string detail = {})
      : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace sway
