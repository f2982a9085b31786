// Eigen must come before httplib: <resolv.h> defines a `_res` macro.
#include "sway/http_server.hpp"

#include <charconv>
#include <cmath>

#include "sway/json_util.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

namespace sway {

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownSession:
    case ErrorCode::UnknownVersion:
    case ErrorCode::UnknownTrack: return 404;
    case ErrorCode::BusySession: return 409;
    case ErrorCode::ClientError: return 502;
    case ErrorCode::UnbakeableFeature:
    case ErrorCode::EmptyTimeline:
    case ErrorCode::EmptyGroup:
    case ErrorCode::DegenerateGeometry:
    case ErrorCode::NonNumericAttribute:
    case ErrorCode::MissingAssignment: return 422;
    case ErrorCode::Io: return 500;
    default: return 400;
  }
}

nlohmann::json error_body(const Error& e) {
  return {{"code", to_string(e.code())}, {"message", e.what()}, {"detail", e.detail()}};
}

namespace {

using json = nlohmann::json;

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(canonical_dump(body), "application/json");
}

json parse_body(const httplib::Request& req) {
  auto j = json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) json_util::violation("$", "request body must be a JSON object");
  return j;
}

std::size_t parse_index(const std::string& text, const char* what) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw Error(ErrorCode::SchemaViolation, std::string("bad ") + what + " '" + text + "'", what);
  return v;
}

std::vector<VersionId> version_list(const json& body) {
  std::vector<VersionId> out;
  if (!body.contains("base_versions")) return out;
  const auto& arr = json_util::array(body["base_versions"], "$.base_versions");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number_unsigned()) json_util::violation(json_util::child("$.base_versions", i), "expected a version id");
    out.push_back(arr[i].get<VersionId>());
  }
  return out;
}

using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

// Runs a route body, turning engine errors into {code, message, detail}.
Handler guarded(Handler body) {
  return [body = std::move(body)](const httplib::Request& req, httplib::Response& res) {
    try {
      body(req, res);
    } catch (const Error& e) {
      send_json(res, error_body(e), http_status(e.code()));
    } catch (const std::exception& e) {
      send_json(res, {{"code", "Internal"}, {"message", e.what()}, {"detail", ""}}, 500);
    }
  };
}

}  // namespace

struct HttpServer::Impl {
  SessionService& service;
  httplib::Server server;

  explicit Impl(SessionService& s) : service(s) { routes(); }

  void routes() {
    const std::string sid = R"(/sessions/([0-9a-zA-Z]+))";
    const std::string ver = sid + R"(/versions/(\d+))";

    server.Post("/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
      std::string svg, styles;
      std::optional<EncodingManifest> manifest;
      if (req.is_multipart_form_data()) {
        if (!req.has_file("svg")) json_util::violation("$.svg", "missing svg part");
        svg = req.get_file_value("svg").content;
        if (req.has_file("styles")) styles = req.get_file_value("styles").content;
        if (req.has_file("manifest")) {
          auto m = json::parse(req.get_file_value("manifest").content, nullptr, false);
          if (m.is_discarded()) json_util::violation("$.manifest", "manifest is not valid JSON");
          manifest = manifest_from_json(m, "$.manifest");
        }
      } else {
        const auto body = parse_body(req);
        svg = json_util::string_field(body, "svg", "$");
        if (body.contains("styles")) styles = json_util::string_field(body, "styles", "$");
        if (body.contains("manifest") && !body["manifest"].is_null())
          manifest = manifest_from_json(body["manifest"], "$.manifest");
      }
      send_json(res, {{"session_id", service.create_session(std::move(svg), std::move(styles), std::move(manifest))}},
                201);
    }));

    server.Get(sid, guarded([this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, session_header_to_json(*service.session(req.matches[1])));
    }));

    server.Post(sid + "/messages", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto body = parse_body(req);
      const auto text = json_util::string_field(body, "text", "$");
      send_json(res, message_result_to_json(service.post_message(req.matches[1], text, version_list(body))));
    }));

    server.Put(sid + "/active", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto body = parse_body(req);
      service.activate(req.matches[1], json_util::uint_field(body, "version", "$"));
      send_json(res, session_header_to_json(*service.session(req.matches[1])));
    }));

    server.Get(sid + "/versions", guarded([this](const httplib::Request& req, httplib::Response& res) {
      json out = json::array();
      for (const auto& v : service.session(req.matches[1])->versions) out.push_back(version_to_json(v));
      send_json(res, out);
    }));

    server.Get(ver, guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto snap = service.session(req.matches[1]);
      send_json(res, version_to_json(snap->version(parse_index(req.matches[2], "version"))));
    }));

    server.Put(ver + R"(/tracks/(\d+)/coordination)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto body = parse_body(req);
      const auto scheme = scheme_from_json(json_util::field(body, "scheme", "$"), "$.scheme");
      send_json(res, version_to_json(service.set_coordination(req.matches[1], parse_index(req.matches[2], "version"),
                                                              parse_index(req.matches[3], "track"), scheme)));
    }));

    server.Put(ver + R"(/tracks/(\d+)/timing)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto body = parse_body(req);
      send_json(res, version_to_json(service.set_timing(req.matches[1], parse_index(req.matches[2], "version"),
                                                        parse_index(req.matches[3], "track"),
                                                        json_util::number_field(body, "delay", "$"),
                                                        json_util::number_field(body, "duration", "$"))));
    }));

    server.Get(ver + "/preview", guarded([this](const httplib::Request& req, httplib::Response& res) {
      if (!req.has_param("t")) json_util::violation("$.t", "missing t");
      const std::string t_text = req.get_param_value("t");
      double t = 0;
      const auto [ptr, ec] = std::from_chars(t_text.data(), t_text.data() + t_text.size(), t);
      if (ec != std::errc() || ptr != t_text.data() + t_text.size() || !std::isfinite(t))
        json_util::violation("$.t", "t must be a number of milliseconds");
      send_json(res, snapshot_to_json(service.preview(req.matches[1], parse_index(req.matches[2], "version"), t)));
    }));

    server.Post(ver + "/export", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto body = parse_body(req);
      const auto flavor = parse_flavor(json_util::string_field(body, "flavor", "$"));
      const auto v = parse_index(req.matches[2], "version");
      auto artifact = service.export_version(req.matches[1], v, flavor);
      res.set_header("Content-Disposition",
                     "attachment; filename=\"version-" + std::to_string(v) + artifact.file_extension + "\"");
      res.set_content(std::move(artifact.bytes), artifact.content_type);
    }));

    server.Get(ver + "/check", guarded([this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, check_report_to_json(service.check(req.matches[1], parse_index(req.matches[2], "version"))));
    }));
  }
};

HttpServer::HttpServer(SessionService& service) : impl_(std::make_unique<Impl>(service)) {}
HttpServer::~HttpServer() = default;

bool HttpServer::mount_static(const std::string& dir) { return impl_->server.set_mount_point("/", dir); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::serve() { return impl_->server.listen_after_bind(); }
void HttpServer::stop() { impl_->server.stop(); }
void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace sway
