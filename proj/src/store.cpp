#include <algorithm>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <random>
#include <set>
#include <sstream>

#include <fcntl.h>
#include <unistd.h>

#include "sway/error.hpp"
#include "sway/json_util.hpp"
#include "sway/service.hpp"

namespace sway {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void io_error(const std::string& what, const fs::path& p) {
  throw Error(ErrorCode::Io, what + ": " + p.string(), p.string());
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) io_error("cannot read", p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void fsync_path(const fs::path& p, int flags) {
  const int fd = ::open(p.c_str(), flags);
  if (fd < 0) return;
  ::fsync(fd);
  ::close(fd);
}

// Writes to a sibling temporary, flushes it and renames it over `p`.
void write_atomic(const fs::path& p, const std::string& bytes) {
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) io_error("cannot write", tmp);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) io_error("cannot write", tmp);
  }
  fsync_path(tmp, O_RDONLY);
  std::error_code ec;
  fs::rename(tmp, p, ec);
  if (ec) io_error("cannot rename into place", p);
  fsync_path(p.parent_path(), O_RDONLY | O_DIRECTORY);
}

std::string version_file(const Version& v) {
  return std::to_string(v.id) + "-" + version_digest(v).substr(0, 16) + ".json";
}

}  // namespace

std::string new_session_id() {
  static std::mutex m;
  static std::random_device rd;
  std::lock_guard lock(m);
  std::string out;
  char buf[9];
  for (int i = 0; i < 4; ++i) {
    std::snprintf(buf, sizeof buf, "%08x", static_cast<unsigned>(rd()));
    out += buf;
  }
  return out;
}

bool is_session_id(std::string_view text) {
  return text.size() == 32 &&
         std::all_of(text.begin(), text.end(), [](char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); });
}

SessionStore::SessionStore(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) io_error("cannot create data directory", root_);
}

fs::path SessionStore::session_dir(const std::string& id) const {
  if (!is_session_id(id)) throw Error(ErrorCode::UnknownSession, "no session '" + id + "'", id);
  return root_ / id;
}

bool SessionStore::exists(const std::string& id) const {
  return is_session_id(id) && fs::exists(root_ / id / "session.json");
}

void SessionStore::save(const Session& s) const {
  const fs::path dir = session_dir(s.id);
  std::error_code ec;
  fs::create_directories(dir / "versions", ec);
  if (ec) io_error("cannot create session directory", dir);

  nlohmann::json header = session_header_to_json(s);
  nlohmann::json files = nlohmann::json::array();
  std::set<std::string> keep;
  for (const auto& v : s.versions) {
    const std::string name = version_file(v);
    const fs::path p = dir / "versions" / name;
    if (!fs::exists(p)) write_atomic(p, canonical_dump(version_to_json(v)));
    files.push_back({{"id", v.id}, {"file", name}, {"digest", version_digest(v)}});
    keep.insert(name);
  }
  header["version_files"] = std::move(files);

  if (!fs::exists(dir / "source.svg") || read_bytes(dir / "source.svg") != s.svg) write_atomic(dir / "source.svg", s.svg);
  if (!fs::exists(dir / "styles.css") || read_bytes(dir / "styles.css") != s.styles)
    write_atomic(dir / "styles.css", s.styles);
  write_atomic(dir / "session.json", canonical_dump(header));

  for (const auto& entry : fs::directory_iterator(dir / "versions", ec)) {
    const auto name = entry.path().filename().string();
    if (!keep.count(name)) fs::remove(entry.path(), ec);
  }
}

Session SessionStore::load(const std::string& id) const {
  using namespace json_util;
  if (!exists(id)) throw Error(ErrorCode::UnknownSession, "no session '" + id + "'", id);
  const fs::path dir = root_ / id;
  const auto header = json::parse(read_bytes(dir / "session.json"), nullptr, false);
  if (header.is_discarded()) io_error("corrupt session header", dir / "session.json");

  try {
    std::optional<EncodingManifest> manifest;
    if (!field(header, "manifest", "$").is_null()) manifest = manifest_from_json(header["manifest"], "$.manifest");
    Session s = make_session(string_field(header, "id", "$"), read_bytes(dir / "source.svg"),
                             read_bytes(dir / "styles.css"), std::move(manifest));
    if (s.id != id) io_error("session header names another session", dir);
    if (s.document.source_digest != string_field(header, "source_digest", "$"))
      io_error("source bytes do not match the recorded digest", dir / "source.svg");

    const auto& history = array(field(header, "history", "$"), "$.history");
    for (std::size_t i = 0; i < history.size(); ++i)
      s.history.push_back(history_entry_from_json(history[i], child("$.history", i)));

    const auto& files = array(field(header, "version_files", "$"), "$.version_files");
    for (std::size_t i = 0; i < files.size(); ++i) {
      const auto path = child("$.version_files", i);
      const auto name = string_field(files[i], "file", path);
      const auto v_json = json::parse(read_bytes(dir / "versions" / name), nullptr, false);
      if (v_json.is_discarded()) io_error("corrupt version file", dir / "versions" / name);
      Version v = version_from_json(v_json, "$");
      if (version_digest(v) != string_field(files[i], "digest", path))
        io_error("version does not match the recorded digest", dir / "versions" / name);
      s.versions.push_back(std::move(v));
    }
    if (!field(header, "active_version", "$").is_null())
      s.active_version = uint_field(header, "active_version", "$");
    return s;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Io) throw;
    throw Error(ErrorCode::Io, "cannot load session " + id + ": " + e.what(), dir.string());
  }
}

std::vector<std::string> SessionStore::list() const {
  std::vector<std::string> out;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(root_, ec)) {
    const auto name = entry.path().filename().string();
    if (exists(name)) out.push_back(name);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace sway
