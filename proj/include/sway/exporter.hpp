#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sway/composition.hpp"
#include "sway/session.hpp"

namespace sway {

inline constexpr std::string_view kProgramFormatVersion = "1.0.0";

struct Provenance {
  std::string session_id;
  std::optional<VersionId> version_id;
  std::string source_digest;
  friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// Portable description of a composed animation. Coordination parameters
/// are viewBox-relative and weights are left for the runtime to compute.
struct AnimationProgram {
  std::string format_version{kProgramFormatVersion};
  Rect viewbox_ref;
  std::vector<GroupClip> tracks;
  Provenance provenance;
  friend bool operator==(const AnimationProgram&, const AnimationProgram&) = default;

  Timeline timeline() const { return {tracks, provenance.version_id}; }
};

/// Throws Error(EmptyTimeline), or Error(InvalidScheme) / Error(InvalidDuration)
/// for tracks that break their invariants.
AnimationProgram export_program(const VectorDocument& doc, const Timeline& timeline,
                                const std::string& session_id = {});

nlohmann::json program_to_json(const AnimationProgram& program);
/// Canonical JSON text of the program.
std::string serialize_program(const AnimationProgram& program);

/// Throws Error(UnsupportedVersion) unless the major version is 1, and
/// Error(SchemaViolation) with the path of the first offending field.
AnimationProgram import_program(std::string_view json_text);

/// ES module text. The program JSON is embedded verbatim and the module
/// exports createAnimation(root, options) returning {play, pause, replay}.
std::string emit_runtime_script(const AnimationProgram& program);

struct BakedDelay {
  std::size_t track = 0;
  ElementIndex element = 0;
  double delay_ms = 0;
};

struct BakedAnimation {
  std::string svg;  // source with a data-sway marker on every animated element
  std::string css;
  std::vector<BakedDelay> delays;
  std::size_t root_content_begin = 0;  // byte offset just past the root start tag

  /// The SVG with the stylesheet inlined as its first child.
  std::string standalone_svg() const;
};

/// CSS timing function for an easing. Quadratic easings map exactly; the
/// cubic and sine curves use close cubic-bezier fits.
std::string css_timing_function(Easing easing);

/// CSS keyframe rendering with weights frozen at bake time. Throws
/// Error(UnbakeableFeature) listing every track that CSS cannot express.
BakedAnimation bake_css(const VectorDocument& doc, const Timeline& timeline,
                        std::span<const WeightAssignment> assignments);

}  // namespace sway
