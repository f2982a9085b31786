#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sway/assistant.hpp"
#include "sway/exporter.hpp"
#include "sway/session.hpp"

namespace sway {

// ---------------------------------------------------------------------------
// Persistence
//
// One directory per session:
//   session.json          header (history, manifest, active version, version files)
//   source.svg            original bytes
//   styles.css            stylesheet text (possibly empty)
//   versions/N-<h>.json   one file per version, <h> = first 16 hex digits of its digest
// session.json is written last and renamed into place, so it always names a
// complete set of files.

/// 128 random bits as 32 lowercase hex digits.
std::string new_session_id();
bool is_session_id(std::string_view text);

class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path session_dir(const std::string& id) const;

  bool exists(const std::string& id) const;
  /// Writes every file of the session. Throws Error(Io).
  void save(const Session& session) const;
  /// Throws Error(UnknownSession), or Error(Io) for unreadable or
  /// inconsistent files.
  Session load(const std::string& id) const;
  std::vector<std::string> list() const;

 private:
  std::filesystem::path root_;
};

// ---------------------------------------------------------------------------
// Service

enum class ExportFlavor { Program, Script, Baked };

std::string_view flavor_name(ExportFlavor flavor);
/// Throws Error(SchemaViolation).
ExportFlavor parse_flavor(std::string_view name);

struct Artifact {
  std::string content_type;
  std::string file_extension;
  std::string bytes;
};

struct MessageResult {
  HistoryEntry request;
  HistoryEntry entry;  // the assistant's reply
  std::optional<Version> version;
  std::vector<Diagnostic> diagnostics;
};

nlohmann::json message_result_to_json(const MessageResult& r);

struct CheckItem {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct CheckReport {
  VersionId version = 0;
  std::vector<Diagnostic> diagnostics;  // clip validation against the document
  std::vector<Warning> warnings;        // encoding conflicts
  std::vector<CheckItem> invariants;

  bool ok() const;
};

nlohmann::json check_report_to_json(const CheckReport& r);

/// Validator and invariant suite for one version: clip validation, encoding
/// conflicts, scheme and timing invariants, weight range, terminal states
/// and the program round trip.
CheckReport check_version(const Session& session, VersionId version);

struct ServiceOptions {
  std::size_t context_budget = kDefaultContextBudget;
  std::uint64_t condense_seed = 0;
  std::function<std::string()> clock = utc_timestamp;
};

/// Thread-safe front end over a SessionStore. Sessions are independent;
/// within one session writes are serialized and readers work on immutable
/// snapshots. At most one prompt per session is in flight.
class SessionService {
 public:
  SessionService(SessionStore store, std::shared_ptr<ModelClient> client, ServiceOptions options = {});
  ~SessionService();

  /// Throws Error(MalformedSvg) and friends; nothing is stored on failure.
  std::string create_session(std::string svg, std::string styles = {},
                             std::optional<EncodingManifest> manifest = std::nullopt);

  /// Immutable snapshot. Throws Error(UnknownSession).
  std::shared_ptr<const Session> session(const std::string& id);

  /// Throws Error(UnknownSession), Error(UnknownVersion), Error(BusySession),
  /// Error(ClientError) or Error(BudgetTooSmall); the session is unchanged on
  /// any error.
  MessageResult post_message(const std::string& id, const std::string& text,
                             const std::vector<VersionId>& base_versions);

  /// Throws Error(UnknownTrack) or Error(InvalidScheme).
  Version set_coordination(const std::string& id, VersionId version, std::size_t track,
                           const CoordinationScheme& scheme);
  /// Throws Error(UnknownTrack) or Error(InvalidDuration).
  Version set_timing(const std::string& id, VersionId version, std::size_t track, double delay_ms,
                     double duration_ms);
  /// Makes an existing version the active one.
  void activate(const std::string& id, VersionId version);

  FrameSnapshot preview(const std::string& id, VersionId version, double t_ms);
  Artifact export_version(const std::string& id, VersionId version, ExportFlavor flavor);
  CheckReport check(const std::string& id, VersionId version);

  const SessionStore& store() const { return store_; }

 private:
  struct Slot;
  std::shared_ptr<Slot> slot(const std::string& id);
  template <typename F>
  Version mutate_version(const std::string& id, VersionId version, F&& edit);

  SessionStore store_;
  std::shared_ptr<ModelClient> client_;
  ServiceOptions options_;
  std::mutex slots_mutex_;
  std::map<std::string, std::shared_ptr<Slot>> slots_;
};

/// StubClient over `stub_dir` unless model credentials are set in the
/// environment, in which case an HttpClient.
std::shared_ptr<ModelClient> client_from_env(const std::filesystem::path& stub_dir);

/// Options with SWAY_CONTEXT_BUDGET applied when set.
ServiceOptions options_from_env();

}  // namespace sway
