#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sway/clip.hpp"
#include "sway/condense.hpp"
#include "sway/session.hpp"

namespace sway {

inline constexpr std::size_t kDefaultContextBudget = 16384;
/// Flat token charge for an attached screenshot (one high-detail image).
inline constexpr std::size_t kScreenshotTokens = 765;

struct PromptBundle {
  std::string system_text;
  std::vector<std::pair<std::string, std::string>> history;  // (role, text)
  std::string user_text;
  std::string svg_text;  // raw or condensed
  std::optional<CondenseReport> condensation;  // set when the SVG was condensed
  std::optional<std::string> screenshot;       // PNG bytes
  std::vector<nlohmann::json> referenced_specs;  // clip JSON of the base versions
  nlohmann::json output_schema;
  std::string one_shot_request;
  std::string one_shot_reply;

  /// The final user turn: request text, referenced clips and the SVG.
  std::string user_content() const;
  std::size_t estimated_tokens() const;
};

/// JSON Schema of the reply `{message, clips?}`; each clip follows the clip
/// wire schema.
const nlohmann::json& reply_schema();

struct PromptOptions {
  std::size_t budget = kDefaultContextBudget;
  std::uint64_t condense_seed = 0;
  std::optional<std::string> screenshot;
};

/// Throws Error(UnknownVersion) for unknown base ids and Error(BudgetTooSmall)
/// when even a fully condensed SVG does not fit.
PromptBundle build_prompt(const Session& session, const std::string& user_text,
                          const std::vector<VersionId>& base_versions, const PromptOptions& options = {});

struct AssistantReply {
  std::string message;
  std::optional<std::vector<ClipSpec>> clips;  // absent for chat-only or rejected replies
  std::string raw;
  std::vector<Diagnostic> diagnostics;
};

/// First balanced JSON object in `raw` that has a string "message".
/// Throws Error(NoJsonFound).
nlohmann::json extract_reply_json(const std::string& raw);

/// Never throws. Prose without a reply object becomes a message-only reply
/// carrying the raw text; a structurally invalid clip drops all clips and
/// keeps the message.
AssistantReply parse_reply(const std::string& raw);

class ModelClient {
 public:
  virtual ~ModelClient() = default;
  /// Raw model text. Throws Error(ClientError) on transport failure.
  virtual std::string complete(const PromptBundle& bundle) = 0;
  virtual std::size_t max_context_tokens() const = 0;
};

/// Replays canned replies from a directory. The file for a request is
/// `<sha256 of the user text>.json`, falling back to `default.json`.
class StubClient : public ModelClient {
 public:
  explicit StubClient(std::filesystem::path fixture_dir, std::size_t max_context = kDefaultContextBudget);
  std::string complete(const PromptBundle& bundle) override;
  std::size_t max_context_tokens() const override { return max_context_; }

  static std::string fixture_key(const std::string& user_text);

 private:
  std::filesystem::path dir_;
  std::size_t max_context_;
};

struct HttpClientConfig {
  std::string base_url;  // e.g. "https://api.openai.com"
  std::string api_key;
  std::string model = "gpt-4o";
  std::string path = "/v1/chat/completions";
  std::chrono::milliseconds timeout{60000};
  std::size_t max_context = 128000;

  /// Reads SWAY_MODEL_URL, SWAY_MODEL_KEY (or OPENAI_API_KEY) and
  /// SWAY_MODEL_NAME. nullopt when no key is set.
  static std::optional<HttpClientConfig> from_env();
};

/// OpenAI-compatible chat-completions client.
class HttpClient : public ModelClient {
 public:
  explicit HttpClient(HttpClientConfig config);
  std::string complete(const PromptBundle& bundle) override;
  std::size_t max_context_tokens() const override { return config_.max_context; }

  /// Request body sent for a bundle.
  nlohmann::json request_body(const PromptBundle& bundle) const;

 private:
  HttpClientConfig config_;
};

/// Result of one prompt: the user's entry, the reply entry and, when the
/// reply carried clips, the new version. Nothing is applied yet.
struct Generation {
  HistoryEntry request;
  HistoryEntry reply;
  std::optional<Version> version;
  std::vector<Diagnostic> diagnostics;
};

struct GenerateOptions {
  PromptOptions prompt;
  std::function<std::string()> clock = utc_timestamp;
};

/// build_prompt, complete, parse_reply and the encoding check. New versions
/// get delay 0, duration 1000 ms, offset 500 ms and ascending layer order.
/// Throws Error(UnknownVersion), Error(ClientError) or Error(BudgetTooSmall).
Generation generate_version(const Session& session, ModelClient& client, const std::string& user_text,
                            const std::vector<VersionId>& base_versions, const GenerateOptions& options = {});

/// Appends the entries and version and makes the version active.
void apply_generation(Session& session, Generation generation);

}  // namespace sway
