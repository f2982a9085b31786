#include "sway/session.hpp"

#include <chrono>
#include <ctime>

#include "sway/digest.hpp"
#include "sway/error.hpp"
#include "sway/json_util.hpp"

namespace sway {

namespace {

nlohmann::json ids_to_json(const std::vector<VersionId>& ids) {
  nlohmann::json out = nlohmann::json::array();
  for (auto id : ids) out.push_back(id);
  return out;
}

std::vector<VersionId> ids_from_json(const nlohmann::json& j, const std::string& path) {
  using namespace json_util;
  std::vector<VersionId> out;
  const auto& arr = array(j, path);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number_unsigned()) violation(child(path, i), "expected a version id");
    out.push_back(arr[i].get<VersionId>());
  }
  return out;
}

}  // namespace

const Version* Session::find_version(VersionId id) const {
  for (const auto& v : versions)
    if (v.id == id) return &v;
  return nullptr;
}

const Version& Session::version(VersionId id) const {
  if (const auto* v = find_version(id)) return *v;
  throw Error(ErrorCode::UnknownVersion, "version " + std::to_string(id) + " does not exist", std::to_string(id));
}

Version& Session::version(VersionId id) {
  return const_cast<Version&>(static_cast<const Session&>(*this).version(id));
}

VersionId Session::next_version_id() const { return versions.empty() ? 1 : versions.back().id + 1; }

Session make_session(std::string id, std::string svg, std::string styles, std::optional<EncodingManifest> manifest) {
  Session s;
  s.document = parse_document(svg, styles);
  s.id = std::move(id);
  s.svg = std::move(svg);
  s.styles = std::move(styles);
  s.manifest = std::move(manifest);
  return s;
}

Timeline version_timeline(const Version& v) { return {v.clips, v.id}; }

std::string role_name(Role r) { return r == Role::User ? "user" : "assistant"; }

nlohmann::json version_to_json(const Version& v) {
  nlohmann::json clips = nlohmann::json::array();
  for (const auto& g : v.clips) clips.push_back(group_clip_to_json(g));
  nlohmann::json warnings = nlohmann::json::array();
  for (const auto& w : v.warnings) warnings.push_back(warning_to_json(w));
  return {{"id", v.id},
          {"clips", std::move(clips)},
          {"origin_message", v.origin_message},
          {"base_versions", ids_to_json(v.base_versions)},
          {"warnings", std::move(warnings)}};
}

Version version_from_json(const nlohmann::json& j, const std::string& path) {
  using namespace json_util;
  Version v;
  v.id = uint_field(j, "id", path);
  v.origin_message = uint_field(j, "origin_message", path);
  const auto cp = child(path, "clips");
  const auto& clips = array(field(j, "clips", path), cp);
  for (std::size_t i = 0; i < clips.size(); ++i) v.clips.push_back(group_clip_from_json(clips[i], child(cp, i)));
  v.base_versions = ids_from_json(field(j, "base_versions", path), child(path, "base_versions"));
  const auto wp = child(path, "warnings");
  const auto& warnings = array(field(j, "warnings", path), wp);
  for (std::size_t i = 0; i < warnings.size(); ++i) v.warnings.push_back(warning_from_json(warnings[i], child(wp, i)));
  return v;
}

std::string version_digest(const Version& v) { return sha256_hex(canonical_dump(version_to_json(v))); }

nlohmann::json history_entry_to_json(const HistoryEntry& e) {
  nlohmann::json j = {{"role", role_name(e.role)},
                      {"text", e.text},
                      {"referred_versions", ids_to_json(e.referred_versions)},
                      {"timestamp", e.timestamp}};
  j["produced_version"] = e.produced_version ? nlohmann::json(*e.produced_version) : nlohmann::json(nullptr);
  return j;
}

HistoryEntry history_entry_from_json(const nlohmann::json& j, const std::string& path) {
  using namespace json_util;
  HistoryEntry e;
  const auto role = string_field(j, "role", path);
  if (role == "user") e.role = Role::User;
  else if (role == "assistant") e.role = Role::Assistant;
  else violation(child(path, "role"), "expected user|assistant");
  e.text = string_field(j, "text", path);
  e.referred_versions = ids_from_json(field(j, "referred_versions", path), child(path, "referred_versions"));
  const auto& produced = field(j, "produced_version", path);
  if (!produced.is_null()) {
    if (!produced.is_number_unsigned()) violation(child(path, "produced_version"), "expected a version id or null");
    e.produced_version = produced.get<VersionId>();
  }
  e.timestamp = string_field(j, "timestamp", path);
  return e;
}

nlohmann::json session_header_to_json(const Session& s) {
  nlohmann::json history = nlohmann::json::array();
  for (const auto& e : s.history) history.push_back(history_entry_to_json(e));
  nlohmann::json versions = nlohmann::json::array();
  for (const auto& v : s.versions) versions.push_back(v.id);
  nlohmann::json j = {{"id", s.id},
                      {"history", std::move(history)},
                      {"versions", std::move(versions)},
                      {"source_digest", sha256_hex(s.svg)}};
  j["manifest"] = s.manifest ? manifest_to_json(*s.manifest) : nlohmann::json(nullptr);
  j["active_version"] = s.active_version ? nlohmann::json(*s.active_version) : nlohmann::json(nullptr);
  return j;
}

std::string canonical_dump(const nlohmann::json& j) {
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict);
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace sway
