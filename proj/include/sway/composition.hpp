#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "sway/clip.hpp"
#include "sway/coordination.hpp"
#include "sway/svg_model.hpp"

namespace sway {

/// Group clips laid out in parallel tracks. Track order matters: when two
/// tracks animate the same property of one element, the later track wins.
struct Timeline {
  std::vector<GroupClip> tracks;
  std::optional<std::size_t> version_id;
  friend bool operator==(const Timeline&, const Timeline&) = default;
};

struct FrameSnapshot {
  double time_ms = 0;
  std::map<ElementIndex, PropertyValues> values;
  friend bool operator==(const FrameSnapshot&, const FrameSnapshot&) = default;
};

/// Returns a copy with one track's delay and duration replaced. Keyframe
/// offsets are normalized, so a new duration rescales the whole clip.
/// Throws Error(UnknownTrack) or Error(InvalidDuration).
Timeline arrange(const Timeline& timeline, std::size_t track, double delay_ms, double duration_ms);

/// One weight assignment per track, computed for the track's selector and
/// coordination scheme. With `allow_empty`, a selector matching nothing gets
/// an empty assignment instead of Error(EmptyGroup).
std::vector<WeightAssignment> assign_timeline(const VectorDocument& doc, const Timeline& timeline,
                                              bool allow_empty = false);

/// End of the last element's first pass over all tracks; 0 when empty.
/// Throws Error(MissingAssignment) when `assignments` does not cover every
/// track's group.
double total_duration(const Timeline& timeline, std::span<const WeightAssignment> assignments);

/// Animated values of every element touched by some track at time t.
/// Elements before their start hold the first keyframe values.
FrameSnapshot sample(const VectorDocument& doc, const Timeline& timeline,
                     std::span<const WeightAssignment> assignments, double t_ms);

/// Static value of a property as the document renders it without animation.
/// Translation and rotation are 0, scale is 1, blur is 0. Colors are
/// nullopt when the paint is not a plain color ("none", gradients).
std::optional<PropertyValue> base_value(const VectorDocument& doc, ElementIndex element,
                                        Property property);

/// Bakes a snapshot into a new document. Start tags of elements whose values
/// differ from their base values are rewritten; every other byte is kept.
/// Translation, rotation and scale act in root user space about the centre of
/// the element's bounding box.
VectorDocument render_static(const VectorDocument& doc, const FrameSnapshot& snapshot);

nlohmann::json property_value_to_json(const PropertyValue& v);
nlohmann::json snapshot_to_json(const FrameSnapshot& snapshot);

}  // namespace sway
