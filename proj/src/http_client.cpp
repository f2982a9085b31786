// Eigen must come before httplib: <resolv.h> defines a `_res` macro.
#include "sway/assistant.hpp"
#include "sway/error.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <openssl/evp.h>

#include <cstdlib>

namespace sway {

namespace {

std::string base64(const std::string& bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(bytes.data()), static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

const char* env(const char* name) {
  const char* v = std::getenv(name);
  return v && *v ? v : nullptr;
}

[[noreturn]] void client_error(const std::string& what) { throw Error(ErrorCode::ClientError, what, what); }

}  // namespace

std::optional<HttpClientConfig> HttpClientConfig::from_env() {
  const char* key = env("SWAY_MODEL_KEY");
  if (!key) key = env("OPENAI_API_KEY");
  if (!key) return std::nullopt;
  HttpClientConfig c;
  c.api_key = key;
  c.base_url = env("SWAY_MODEL_URL") ? env("SWAY_MODEL_URL") : "https://api.openai.com";
  if (const char* model = env("SWAY_MODEL_NAME")) c.model = model;
  return c;
}

HttpClient::HttpClient(HttpClientConfig config) : config_(std::move(config)) {}

nlohmann::json HttpClient::request_body(const PromptBundle& b) const {
  using nlohmann::json;
  json messages = json::array();
  messages.push_back({{"role", "system"},
                      {"content", b.system_text + "\n\nThe reply must validate against this JSON Schema:\n" +
                                      b.output_schema.dump()}});
  messages.push_back({{"role", "user"}, {"content", b.one_shot_request}});
  messages.push_back({{"role", "assistant"}, {"content", b.one_shot_reply}});
  for (const auto& [role, text] : b.history) messages.push_back({{"role", role}, {"content", text}});
  json content = json::array({{{"type", "text"}, {"text", b.user_content()}}});
  if (b.screenshot)
    content.push_back(
        {{"type", "image_url"}, {"image_url", {{"url", "data:image/png;base64," + base64(*b.screenshot)}}}});
  messages.push_back({{"role", "user"}, {"content", std::move(content)}});
  return {{"model", config_.model}, {"messages", std::move(messages)}, {"response_format", {{"type", "json_object"}}}};
}

std::string HttpClient::complete(const PromptBundle& bundle) {
  httplib::Client cli(config_.base_url);
  if (!cli.is_valid()) client_error("invalid model endpoint '" + config_.base_url + "'");
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
  cli.set_connection_timeout(secs.count(), usecs.count());
  cli.set_read_timeout(secs.count(), usecs.count());
  cli.set_write_timeout(secs.count(), usecs.count());
  cli.set_bearer_token_auth(config_.api_key);

  auto res = cli.Post(config_.path, request_body(bundle).dump(), "application/json");
  if (!res) client_error("model request failed: " + httplib::to_string(res.error()));
  if (res->status != 200)
    client_error("model endpoint answered HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
  auto j = nlohmann::json::parse(res->body, nullptr, false);
  if (j.is_discarded() || !j.contains("choices") || !j["choices"].is_array() || j["choices"].empty())
    client_error("model response has no choices");
  const auto& content = j["choices"][0]["message"]["content"];
  if (!content.is_string()) client_error("model response has no text content");
  return content.get<std::string>();
}

}  // namespace sway
