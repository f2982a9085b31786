#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sway/clip.hpp"
#include "sway/svg_model.hpp"

namespace sway {

/// Visual channels a group may use to carry data.
enum class Channel { FillColor, StrokeColor, Size, XPosition, YPosition, Opacity, Shape };

inline constexpr std::array<Channel, 7> kAllChannels{Channel::FillColor, Channel::StrokeColor, Channel::Size,
                                                     Channel::XPosition, Channel::YPosition, Channel::Opacity,
                                                     Channel::Shape};

std::string_view channel_name(Channel c);
std::optional<Channel> parse_channel(std::string_view name);

struct EncodingEntry {
  std::string selector;
  Channel channel = Channel::FillColor;
  std::string meaning;
  friend bool operator==(const EncodingEntry&, const EncodingEntry&) = default;
};

/// Which groups carry data through which channel.
struct EncodingManifest {
  std::vector<EncodingEntry> entries;
  friend bool operator==(const EncodingManifest&, const EncodingManifest&) = default;
};

nlohmann::json manifest_to_json(const EncodingManifest& m);
/// Throws Error(SchemaViolation) for unknown channels or empty selectors.
EncodingManifest manifest_from_json(const nlohmann::json& j, const std::string& path = "$");

/// Advisory note that an animation may distort a data-carrying channel.
struct Warning {
  Channel channel = Channel::FillColor;
  std::string selector;  // the clip's selector
  std::string rationale;
  friend bool operator==(const Warning&, const Warning&) = default;
};

nlohmann::json warning_to_json(const Warning& w);
Warning warning_from_json(const nlohmann::json& j, const std::string& path = "$");

/// True when animating `property` alters what `channel` shows.
constexpr bool conflicts(Property property, Channel channel) {
  switch (property) {
    case Property::FillColor:
    case Property::StrokeColor:
      return channel == Channel::FillColor || channel == Channel::StrokeColor;
    case Property::Scale:
      return channel == Channel::Size;
    case Property::TranslateX:
      return channel == Channel::XPosition;
    case Property::TranslateY:
      return channel == Channel::YPosition;
    case Property::Opacity:
      return channel == Channel::Opacity;
    case Property::Rotate:
    case Property::StrokeWidth:
    case Property::FilterBlur:
      return false;
  }
  return false;
}

/// One warning per (clip, manifest entry) pair whose selectors are equal and
/// where some track of the clip conflicts with the entry's channel.
std::vector<Warning> check_encoding_conflict(const EncodingManifest& manifest, const std::vector<ClipSpec>& clips);

/// Same, but selectors match when they select at least one common element
/// of `doc`.
std::vector<Warning> check_encoding_conflict(const EncodingManifest& manifest, const std::vector<ClipSpec>& clips,
                                             const VectorDocument& doc);

}  // namespace sway
