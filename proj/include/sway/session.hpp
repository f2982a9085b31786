#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sway/clip.hpp"
#include "sway/composition.hpp"
#include "sway/encoding.hpp"
#include "sway/svg_model.hpp"

namespace sway {

using VersionId = std::size_t;

/// One generated set of group clips. Versions are never edited in place by
/// the assistant; timing and coordination edits replace the stored record.
struct Version {
  VersionId id = 0;
  std::vector<GroupClip> clips;
  std::size_t origin_message = 0;  // index into Session::history
  std::vector<VersionId> base_versions;
  std::vector<Warning> warnings;
  friend bool operator==(const Version&, const Version&) = default;
};

enum class Role { User, Assistant };

struct HistoryEntry {
  Role role = Role::User;
  std::string text;
  std::vector<VersionId> referred_versions;
  std::optional<VersionId> produced_version;
  std::string timestamp;  // ISO 8601, UTC
  friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

struct Session {
  std::string id;
  std::string svg;  // original bytes
  std::string styles;
  std::optional<EncodingManifest> manifest;
  std::vector<HistoryEntry> history;
  std::vector<Version> versions;
  std::optional<VersionId> active_version;
  VectorDocument document;  // parsed from `svg` and `styles`

  const Version* find_version(VersionId id) const;
  /// Throws Error(UnknownVersion).
  const Version& version(VersionId id) const;
  Version& version(VersionId id);
  VersionId next_version_id() const;

  /// Compares everything except the derived document.
  friend bool operator==(const Session& a, const Session& b) {
    return a.id == b.id && a.svg == b.svg && a.styles == b.styles && a.manifest == b.manifest &&
           a.history == b.history && a.versions == b.versions && a.active_version == b.active_version;
  }
};

/// Parses the document; throws Error(MalformedSvg) and friends.
Session make_session(std::string id, std::string svg, std::string styles = {},
                     std::optional<EncodingManifest> manifest = std::nullopt);

Timeline version_timeline(const Version& v);

std::string role_name(Role r);

nlohmann::json version_to_json(const Version& v);
Version version_from_json(const nlohmann::json& j, const std::string& path = "$");
/// sha-256 of the canonical version JSON.
std::string version_digest(const Version& v);

nlohmann::json history_entry_to_json(const HistoryEntry& e);
HistoryEntry history_entry_from_json(const nlohmann::json& j, const std::string& path = "$");

/// Everything but the SVG bytes, stylesheet and versions, which are stored
/// as separate files.
nlohmann::json session_header_to_json(const Session& s);

/// Canonical text: sorted keys, shortest round-trip numbers, no whitespace.
std::string canonical_dump(const nlohmann::json& j);

/// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp();

}  // namespace sway
