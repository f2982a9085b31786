#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sway/color.hpp"
#include "sway/coordination.hpp"
#include "sway/svg_model.hpp"

namespace sway {

// ---------------------------------------------------------------------------
// Properties and values

enum class Property {
  TranslateX,
  TranslateY,
  Rotate,
  Scale,
  Opacity,
  FillColor,
  StrokeColor,
  StrokeWidth,
  FilterBlur,
};

inline constexpr std::array<Property, 9> kAllProperties{
    Property::TranslateX, Property::TranslateY, Property::Rotate,
    Property::Scale,      Property::Opacity,    Property::FillColor,
    Property::StrokeColor, Property::StrokeWidth, Property::FilterBlur};

std::string_view property_name(Property p);
std::optional<Property> parse_property(std::string_view name);

enum class ValueKind { Scalar, Color };

constexpr ValueKind value_kind(Property p) {
  return p == Property::FillColor || p == Property::StrokeColor ? ValueKind::Color
                                                                : ValueKind::Scalar;
}

/// Scalars are unitless (opacity, scale), degrees (rotate) or user units.
using PropertyValue = std::variant<double, Color>;

constexpr ValueKind kind_of(const PropertyValue& v) {
  return std::holds_alternative<Color>(v) ? ValueKind::Color : ValueKind::Scalar;
}

// ---------------------------------------------------------------------------
// Easing

enum class Easing { Linear, EaseInQuad, EaseOutQuad, EaseInOutCubic, SineInOut };

std::string_view easing_name(Easing e);
std::optional<Easing> parse_easing(std::string_view name);

double apply_easing(Easing easing, double u);
/// Throws Error(UnknownEasing).
double apply_easing(std::string_view easing, double u);

// ---------------------------------------------------------------------------
// Clips

struct Keyframe {
  double offset = 0;  // normalized [0,1]
  PropertyValue value = 0.0;
  Easing easing_out = Easing::Linear;  // segment starting here
  friend bool operator==(const Keyframe&, const Keyframe&) = default;
};

struct PropertyTrack {
  Property property = Property::Opacity;
  std::vector<Keyframe> keyframes;
  friend bool operator==(const PropertyTrack&, const PropertyTrack&) = default;
};

struct ClipSpec {
  std::string selector;
  std::vector<PropertyTrack> tracks;
  std::string title;
  std::string description;
  bool loop = false;
  friend bool operator==(const ClipSpec&, const ClipSpec&) = default;
};

inline constexpr double kDefaultDurationMs = 1000.0;
inline constexpr double kDefaultOffsetMs = 500.0;

struct GroupClip {
  ClipSpec clip;
  double delay_ms = 0.0;
  double duration_ms = kDefaultDurationMs;
  double offset_ms = kDefaultOffsetMs;
  CoordinationScheme coordination = LayerCentric{};
  friend bool operator==(const GroupClip&, const GroupClip&) = default;
};

PropertyValue interpolate_track(const PropertyTrack& track, double u);

using PropertyValues = std::map<Property, PropertyValue>;

/// Values of every track at clip-local progress `local_u` (any real). Before
/// the start the first keyframes hold; after the end the last keyframes hold
/// unless the clip loops.
PropertyValues clip_value_at(const ClipSpec& clip, double local_u);

// ---------------------------------------------------------------------------
// Validation

enum class DiagnosticKind {
  UnknownSelector,
  EmptySelector,
  EmptyTitle,
  UnknownProperty,
  DuplicateTrack,
  TooFewKeyframes,
  NonMonotoneOffsets,
  KeyframeBounds,  // first offset != 0 or last != 1
  ColorOutOfRange,
  ValueKindMismatch,
  NonFiniteValue,
  UnknownEasing,
  SchemaError,
};

std::string_view diagnostic_name(DiagnosticKind kind);

/// Everything except UnknownSelector, which depends on the target document.
constexpr bool is_structural(DiagnosticKind kind) { return kind != DiagnosticKind::UnknownSelector; }

struct Diagnostic {
  DiagnosticKind kind;
  std::string path;
  std::string message;
};

std::vector<Diagnostic> validate_clip(const ClipSpec& clip, const VectorDocument& doc);
/// Structural checks only.
std::vector<Diagnostic> validate_clip(const ClipSpec& clip);

// ---------------------------------------------------------------------------
// JSON schema (also the assistant's structured-output shape)

nlohmann::json clip_to_json(const ClipSpec& clip);

struct ClipParse {
  std::optional<ClipSpec> clip;  // set when there are no structural diagnostics
  std::vector<Diagnostic> diagnostics;
};

/// Reads the wire schema, reporting unknown property names, out-of-range
/// colors and the like as diagnostics rather than exceptions.
ClipParse parse_clip(const nlohmann::json& j, const std::string& path = "$");

nlohmann::json group_clip_to_json(const GroupClip& g);
/// Strict; throws Error(SchemaViolation) with the offending path.
GroupClip group_clip_from_json(const nlohmann::json& j, const std::string& path = "$");

/// Throws Error(InvalidDuration) unless delay >= 0, duration > 0, offset >= 0.
void validate_timing(double delay_ms, double duration_ms, double offset_ms);

}  // namespace sway
