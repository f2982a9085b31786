#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sway/http_server.hpp"
#include "sway/json_util.hpp"
#include "sway/service.hpp"

namespace {

using namespace sway;
using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path, path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !out.write(bytes.data(), static_cast<std::streamsize>(bytes.size())))
    throw Error(ErrorCode::Io, "cannot write " + path, path);
}

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

Point parse_point(const std::string& text) {
  const auto comma = text.find(',');
  try {
    if (comma == std::string::npos) throw std::invalid_argument(text);
    std::size_t used = 0;
    const double x = std::stod(text.substr(0, comma), &used);
    const double y = std::stod(text.substr(comma + 1), &used);
    return {x, y};
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::SchemaViolation, "expected a point as x,y but got '" + text + "'", text);
  }
}

struct CoordArgs {
  std::string mode;
  std::string center, start, end, direction = "ascending", basis = "value", attribute;
  std::vector<std::string> points;
  std::uint64_t seed = 0;
  bool user_units = false;
};

CoordinationScheme build_scheme(const CoordArgs& a, const Rect& viewbox) {
  auto rel = [&](const std::string& text) {
    const Point p = parse_point(text);
    return json_util::to_json(a.user_units ? to_relative(viewbox, p) : p);
  };
  auto need = [&](const std::string& value, const char* flag) {
    if (value.empty()) throw Error(ErrorCode::SchemaViolation, "mode " + a.mode + " needs " + flag, flag);
    return value;
  };
  json j = {{"mode", a.mode}};
  if (a.mode == "layout-radius") {
    j["center"] = rel(need(a.center, "--center"));
  } else if (a.mode == "layout-projection") {
    j["start"] = rel(need(a.start, "--start"));
    j["end"] = rel(need(a.end, "--end"));
  } else if (a.mode == "layout-sketch") {
    j["polyline"] = json::array();
    for (const auto& p : a.points) j["polyline"].push_back(rel(p));
  } else if (a.mode == "layer-centric") {
    j["direction"] = a.direction;
  } else if (a.mode == "data-centric") {
    j["direction"] = a.direction;
    j["basis"] = a.basis;
    if (!a.attribute.empty()) j["attribute"] = a.attribute;
  } else if (a.mode == "random") {
    j["seed"] = a.seed;
  }
  auto scheme = scheme_from_json(j, "--mode");
  validate_scheme(scheme);
  return scheme;
}

void print_message(const MessageResult& r) {
  std::cout << r.entry.text << "\n";
  for (const auto& d : r.diagnostics)
    std::cout << "diagnostic " << diagnostic_name(d.kind) << " at " << d.path << ": " << d.message << "\n";
  if (!r.version) return;
  std::cout << "version " << r.version->id << " with " << r.version->clips.size() << " clip(s)\n";
  for (std::size_t i = 0; i < r.version->clips.size(); ++i)
    std::cout << "  track " << i << ": " << r.version->clips[i].clip.title << " (" << r.version->clips[i].clip.selector
              << ")\n";
  for (const auto& w : r.version->warnings) std::cout << "warning: " << w.rationale << "\n";
}

HttpServer* g_server = nullptr;

extern "C" void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coordinated SVG animation engine: sessions, prompts, coordination, export."};
  app.require_subcommand(1);
  std::string data_dir = env_or("SWAY_DATA_DIR", "sway-data");
  std::string stub_dir = env_or("SWAY_STUB_DIR", SWAY_DEFAULT_STUB_DIR);
  app.add_option("--data-dir", data_dir, "Session directory (env SWAY_DATA_DIR)");
  app.add_option("--stub-dir", stub_dir, "Canned replies used when no model credentials are set (env SWAY_STUB_DIR)");

  std::string svg_path, manifest_path, styles_path;
  auto* cmd_new = app.add_subcommand("new", "Create a session from an SVG file");
  cmd_new->add_option("svg", svg_path, "SVG file")->required();
  cmd_new->add_option("--manifest", manifest_path, "Encoding manifest JSON");
  cmd_new->add_option("--styles", styles_path, "Stylesheet applied to the SVG");

  std::string session_id, text;
  std::vector<VersionId> bases;
  auto* cmd_prompt = app.add_subcommand("prompt", "Send a request to the assistant");
  cmd_prompt->add_option("session", session_id)->required();
  cmd_prompt->add_option("text", text)->required();
  cmd_prompt->add_option("--base", bases, "Version(s) the request builds on");

  VersionId version = 0;
  std::size_t track = 0;
  CoordArgs coord;
  auto* cmd_coord = app.add_subcommand("coord", "Set a track's coordination scheme");
  cmd_coord->add_option("session", session_id)->required();
  cmd_coord->add_option("version", version)->required();
  cmd_coord->add_option("track", track)->required();
  cmd_coord->add_option("--mode", coord.mode, "Coordination mode")
      ->required()
      ->check(CLI::IsMember({"data-centric", "layout-radius", "layout-projection", "layout-sketch", "layer-centric",
                             "random"}));
  cmd_coord->add_option("--center", coord.center, "Radius centre x,y");
  cmd_coord->add_option("--start", coord.start, "Projection start x,y");
  cmd_coord->add_option("--end", coord.end, "Projection end x,y");
  cmd_coord->add_option("--point", coord.points, "Sketch point x,y (repeat in order)");
  cmd_coord->add_option("--direction", coord.direction)->check(CLI::IsMember({"ascending", "descending"}));
  cmd_coord->add_option("--basis", coord.basis)->check(CLI::IsMember({"value", "rank"}));
  cmd_coord->add_option("--attribute", coord.attribute, "data-* attribute holding the value");
  cmd_coord->add_option("--seed", coord.seed, "Random seed");
  cmd_coord->add_flag("--user-units", coord.user_units, "Points are in SVG user units rather than viewBox fractions");

  double delay = 0, duration = 0;
  auto* cmd_timing = app.add_subcommand("timing", "Set a track's delay and duration");
  cmd_timing->add_option("session", session_id)->required();
  cmd_timing->add_option("version", version)->required();
  cmd_timing->add_option("track", track)->required();
  cmd_timing->add_option("--delay", delay, "ms")->required();
  cmd_timing->add_option("--duration", duration, "ms")->required();

  double t_ms = 0;
  auto* cmd_preview = app.add_subcommand("preview", "Print the animated values at a time");
  cmd_preview->add_option("session", session_id)->required();
  cmd_preview->add_option("version", version)->required();
  cmd_preview->add_option("-t,--time", t_ms, "ms")->required();

  std::string flavor = "program", out_path;
  auto* cmd_export = app.add_subcommand("export", "Export a version");
  cmd_export->add_option("session", session_id)->required();
  cmd_export->add_option("version", version)->required();
  cmd_export->add_option("--flavor", flavor)->check(CLI::IsMember({"program", "script", "baked"}));
  cmd_export->add_option("-o,--output", out_path, "Output file (stdout when omitted)");

  auto* cmd_check = app.add_subcommand("check", "Run the validator and invariant suite on a version");
  cmd_check->add_option("session", session_id)->required();
  cmd_check->add_option("version", version)->required();

  auto* cmd_list = app.add_subcommand("list", "List stored sessions");

  std::string host = "127.0.0.1", static_dir;
  int port = 8080;
  auto* cmd_serve = app.add_subcommand("serve", "Serve the HTTP API");
  cmd_serve->add_option("--host", host);
  cmd_serve->add_option("--port", port);
  cmd_serve->add_option("--static", static_dir, "Directory of browser assets served at /");

  CLI11_PARSE(app, argc, argv);

  try {
    SessionService service(SessionStore(data_dir), client_from_env(stub_dir), options_from_env());

    if (*cmd_new) {
      std::optional<EncodingManifest> manifest;
      if (!manifest_path.empty()) {
        auto j = json::parse(read_file(manifest_path), nullptr, false);
        if (j.is_discarded()) throw Error(ErrorCode::SchemaViolation, manifest_path + " is not valid JSON", "$");
        manifest = manifest_from_json(j);
      }
      std::cout << service.create_session(read_file(svg_path), styles_path.empty() ? "" : read_file(styles_path),
                                          std::move(manifest))
                << "\n";
    } else if (*cmd_prompt) {
      print_message(service.post_message(session_id, text, bases));
    } else if (*cmd_coord) {
      const auto scheme = build_scheme(coord, service.session(session_id)->document.viewbox);
      const auto v = service.set_coordination(session_id, version, track, scheme);
      std::cout << canonical_dump(scheme_to_json(v.clips[track].coordination)) << "\n";
    } else if (*cmd_timing) {
      const auto v = service.set_timing(session_id, version, track, delay, duration);
      std::cout << "track " << track << ": delay " << format_number(v.clips[track].delay_ms) << " ms, duration "
                << format_number(v.clips[track].duration_ms) << " ms\n";
    } else if (*cmd_preview) {
      std::cout << canonical_dump(snapshot_to_json(service.preview(session_id, version, t_ms))) << "\n";
    } else if (*cmd_export) {
      const auto artifact = service.export_version(session_id, version, parse_flavor(flavor));
      if (out_path.empty()) std::cout << artifact.bytes;
      else write_file(out_path, artifact.bytes);
    } else if (*cmd_check) {
      const auto report = service.check(session_id, version);
      for (const auto& d : report.diagnostics)
        std::cout << "diagnostic " << diagnostic_name(d.kind) << " at " << d.path << ": " << d.message << "\n";
      for (const auto& w : report.warnings) std::cout << "warning: " << w.rationale << "\n";
      for (const auto& c : report.invariants)
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << (c.detail.empty() ? "" : ": " + c.detail) << "\n";
      return report.ok() ? 0 : 1;
    } else if (*cmd_list) {
      for (const auto& id : service.store().list()) std::cout << id << "\n";
    } else if (*cmd_serve) {
      HttpServer server(service);
      if (!static_dir.empty() && !server.mount_static(static_dir))
        throw Error(ErrorCode::Io, "cannot serve " + static_dir, static_dir);
      const int bound = server.bind(host, port);
      if (bound < 0) throw Error(ErrorCode::Io, "cannot listen on " + host + ":" + std::to_string(port));
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "listening on http://" << host << ":" << bound << "\n";
      server.serve();
      g_server = nullptr;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}
