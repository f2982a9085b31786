#pragma once

#include <memory>
#include <string>

#include <json.hpp>

#include "sway/error.hpp"
#include "sway/service.hpp"

namespace sway {

/// HTTP status used for an engine error.
int http_status(ErrorCode code);
nlohmann::json error_body(const Error& e);

/// JSON API over a SessionService. Routes:
///   POST /sessions                                   multipart svg, styles?, manifest?
///   GET  /sessions/{id}
///   POST /sessions/{id}/messages                     {text, base_versions}
///   GET  /sessions/{id}/versions
///   GET  /sessions/{id}/versions/{v}
///   PUT  /sessions/{id}/versions/{v}/tracks/{k}/coordination   {scheme}
///   PUT  /sessions/{id}/versions/{v}/tracks/{k}/timing         {delay, duration}
///   PUT  /sessions/{id}/active                       {version}
///   GET  /sessions/{id}/versions/{v}/preview?t=ms
///   POST /sessions/{id}/versions/{v}/export          {flavor}
///   GET  /sessions/{id}/versions/{v}/check
/// Errors answer {code, message, detail}.
class HttpServer {
 public:
  explicit HttpServer(SessionService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Serves files under `dir` at "/" (the browser studio's assets).
  bool mount_static(const std::string& dir);
  /// Binds and returns the port; port 0 picks a free one. Returns -1 on failure.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  bool serve();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sway
