#include <atomic>
#include <algorithm>
#include <cstdlib>

#include "sway/error.hpp"
#include "sway/service.hpp"

namespace sway {

std::string_view flavor_name(ExportFlavor flavor) {
  switch (flavor) {
    case ExportFlavor::Program: return "program";
    case ExportFlavor::Script: return "script";
    case ExportFlavor::Baked: return "baked";
  }
  return "program";
}

ExportFlavor parse_flavor(std::string_view name) {
  for (auto f : {ExportFlavor::Program, ExportFlavor::Script, ExportFlavor::Baked})
    if (flavor_name(f) == name) return f;
  throw Error(ErrorCode::SchemaViolation, "unknown export flavor '" + std::string(name) + "'", "$.flavor");
}

namespace {

nlohmann::json diagnostic_to_json(const Diagnostic& d) {
  return {{"kind", diagnostic_name(d.kind)}, {"path", d.path}, {"message", d.message}};
}

}  // namespace

nlohmann::json message_result_to_json(const MessageResult& r) {
  nlohmann::json diagnostics = nlohmann::json::array();
  for (const auto& d : r.diagnostics) diagnostics.push_back(diagnostic_to_json(d));
  return {{"request", history_entry_to_json(r.request)},
          {"entry", history_entry_to_json(r.entry)},
          {"version", r.version ? version_to_json(*r.version) : nlohmann::json(nullptr)},
          {"diagnostics", std::move(diagnostics)}};
}

// ---------------------------------------------------------------------------
// Check suite

bool CheckReport::ok() const {
  return diagnostics.empty() &&
         std::all_of(invariants.begin(), invariants.end(), [](const CheckItem& c) { return c.passed; });
}

nlohmann::json check_report_to_json(const CheckReport& r) {
  nlohmann::json diagnostics = nlohmann::json::array();
  for (const auto& d : r.diagnostics) diagnostics.push_back(diagnostic_to_json(d));
  nlohmann::json warnings = nlohmann::json::array();
  for (const auto& w : r.warnings) warnings.push_back(warning_to_json(w));
  nlohmann::json invariants = nlohmann::json::array();
  for (const auto& c : r.invariants) invariants.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return {{"version", r.version},
          {"ok", r.ok()},
          {"diagnostics", std::move(diagnostics)},
          {"warnings", std::move(warnings)},
          {"invariants", std::move(invariants)}};
}

CheckReport check_version(const Session& session, VersionId id) {
  const Version& v = session.version(id);
  const VectorDocument& doc = session.document;
  CheckReport report;
  report.version = id;

  std::vector<ClipSpec> specs;
  for (std::size_t i = 0; i < v.clips.size(); ++i) {
    for (auto d : validate_clip(v.clips[i].clip, doc)) {
      d.path = "$.clips[" + std::to_string(i) + "]" + (d.path.size() > 1 ? d.path.substr(1) : "");
      report.diagnostics.push_back(std::move(d));
    }
    specs.push_back(v.clips[i].clip);
  }
  if (session.manifest) report.warnings = check_encoding_conflict(*session.manifest, specs, doc);

  auto item = [&](std::string name, auto&& body) {
    CheckItem c{std::move(name), true, {}};
    try {
      c.detail = body();
      c.passed = c.detail.empty();
    } catch (const Error& e) {
      c.passed = false;
      c.detail = std::string(to_string(e.code())) + ": " + e.what();
    }
    report.invariants.push_back(std::move(c));
  };

  const Timeline tl = version_timeline(v);
  item("schemes and timing are valid", [&] {
    for (const auto& g : tl.tracks) {
      validate_scheme(g.coordination);
      validate_timing(g.delay_ms, g.duration_ms, g.offset_ms);
    }
    return std::string();
  });

  std::vector<WeightAssignment> assignments;
  item("every group resolves to elements with weights in [0,1]", [&] {
    assignments = assign_timeline(doc, tl);
    for (std::size_t i = 0; i < assignments.size(); ++i) {
      const auto& w = assignments[i].weights;
      for (double x : w)
        if (!(x >= 0 && x <= 1)) return "track " + std::to_string(i) + " has weight " + format_number(x);
      const bool zero = std::all_of(w.begin(), w.end(), [](double x) { return x == 0; });
      const auto mm = std::minmax_element(w.begin(), w.end());
      if (!zero && !std::holds_alternative<RandomOrder>(assignments[i].scheme) && (*mm.first != 0 || *mm.second != 1))
        return "track " + std::to_string(i) + " weights do not span [0,1]";
    }
    return std::string();
  });

  if (assignments.size() == tl.tracks.size()) {
    item("non-looping tracks settle on their last keyframes", [&] {
      const double end = total_duration(tl, assignments);
      const auto snap = sample(doc, tl, assignments, end + 1);
      for (std::size_t i = 0; i < tl.tracks.size(); ++i) {
        if (tl.tracks[i].clip.loop) continue;
        const auto terminal = clip_value_at(tl.tracks[i].clip, 1.0);
        for (auto e : assignments[i].elements) {
          for (const auto& [p, value] : terminal) {
            bool overridden = false;
            for (std::size_t j = i + 1; j < tl.tracks.size(); ++j)
              for (const auto& t : tl.tracks[j].clip.tracks)
                overridden |= t.property == p && assignments[j].weight_of(e).has_value();
            if (!overridden && snap.values.at(e).at(p) != value)
              return "track " + std::to_string(i) + " element " + std::to_string(e) + " ends off its last keyframe";
          }
        }
      }
      return std::string();
    });
  }

  item("program export round-trips byte-identically", [&] {
    const auto text = serialize_program(export_program(doc, tl, session.id));
    return serialize_program(import_program(text)) == text ? std::string() : std::string("second export differs");
  });
  return report;
}

// ---------------------------------------------------------------------------
// Service

struct SessionService::Slot {
  std::mutex write_mutex;
  mutable std::mutex snapshot_mutex;
  std::shared_ptr<const Session> current;
  std::atomic<bool> generating{false};

  std::shared_ptr<const Session> snapshot() const {
    std::lock_guard lock(snapshot_mutex);
    return current;
  }
  void publish(Session s) {
    auto next = std::make_shared<const Session>(std::move(s));
    std::lock_guard lock(snapshot_mutex);
    current = std::move(next);
  }
};

SessionService::SessionService(SessionStore store, std::shared_ptr<ModelClient> client, ServiceOptions options)
    : store_(std::move(store)), client_(std::move(client)), options_(std::move(options)) {}

SessionService::~SessionService() = default;

std::shared_ptr<SessionService::Slot> SessionService::slot(const std::string& id) {
  std::lock_guard lock(slots_mutex_);
  if (auto it = slots_.find(id); it != slots_.end()) return it->second;
  auto s = std::make_shared<Slot>();
  s->current = std::make_shared<const Session>(store_.load(id));
  slots_.emplace(id, s);
  return s;
}

std::string SessionService::create_session(std::string svg, std::string styles,
                                           std::optional<EncodingManifest> manifest) {
  std::string id = new_session_id();
  while (store_.exists(id)) id = new_session_id();
  Session s = make_session(id, std::move(svg), std::move(styles), std::move(manifest));
  store_.save(s);
  auto slot = std::make_shared<Slot>();
  slot->current = std::make_shared<const Session>(std::move(s));
  std::lock_guard lock(slots_mutex_);
  slots_[id] = std::move(slot);
  return id;
}

std::shared_ptr<const Session> SessionService::session(const std::string& id) { return slot(id)->snapshot(); }

MessageResult SessionService::post_message(const std::string& id, const std::string& text,
                                           const std::vector<VersionId>& base_versions) {
  auto s = slot(id);
  bool idle = false;
  if (!s->generating.compare_exchange_strong(idle, true))
    throw Error(ErrorCode::BusySession, "session " + id + " is already generating a reply", id);
  struct Release {
    std::atomic<bool>& flag;
    ~Release() { flag = false; }
  } release{s->generating};

  const auto snap = s->snapshot();
  GenerateOptions opts;
  opts.prompt.budget = options_.context_budget;
  opts.prompt.condense_seed = options_.condense_seed;
  opts.clock = options_.clock;
  Generation g = generate_version(*snap, *client_, text, base_versions, opts);

  MessageResult result{g.request, g.reply, g.version, g.diagnostics};
  std::lock_guard write(s->write_mutex);
  Session next = *s->snapshot();
  apply_generation(next, std::move(g));
  store_.save(next);
  s->publish(std::move(next));
  return result;
}

template <typename F>
Version SessionService::mutate_version(const std::string& id, VersionId version, F&& edit) {
  auto s = slot(id);
  std::lock_guard write(s->write_mutex);
  Session next = *s->snapshot();
  Version& v = next.version(version);
  const Version before = v;
  edit(v);
  if (v == before) return v;
  const Version out = v;
  store_.save(next);
  s->publish(std::move(next));
  return out;
}

Version SessionService::set_coordination(const std::string& id, VersionId version, std::size_t track,
                                         const CoordinationScheme& scheme) {
  return mutate_version(id, version, [&](Version& v) {
    if (track >= v.clips.size())
      throw Error(ErrorCode::UnknownTrack, "version " + std::to_string(version) + " has no track " + std::to_string(track),
                  std::to_string(track));
    validate_scheme(scheme);
    v.clips[track].coordination = scheme;
  });
}

Version SessionService::set_timing(const std::string& id, VersionId version, std::size_t track, double delay_ms,
                                   double duration_ms) {
  return mutate_version(id, version, [&](Version& v) {
    v.clips = arrange(version_timeline(v), track, delay_ms, duration_ms).tracks;
  });
}

void SessionService::activate(const std::string& id, VersionId version) {
  auto s = slot(id);
  std::lock_guard write(s->write_mutex);
  Session next = *s->snapshot();
  next.version(version);
  if (next.active_version == version) return;
  next.active_version = version;
  store_.save(next);
  s->publish(std::move(next));
}

FrameSnapshot SessionService::preview(const std::string& id, VersionId version, double t_ms) {
  const auto snap = session(id);
  const Timeline tl = version_timeline(snap->version(version));
  const auto assignments = assign_timeline(snap->document, tl);
  return sample(snap->document, tl, assignments, t_ms);
}

Artifact SessionService::export_version(const std::string& id, VersionId version, ExportFlavor flavor) {
  const auto snap = session(id);
  const Timeline tl = version_timeline(snap->version(version));
  switch (flavor) {
    case ExportFlavor::Program:
      return {"application/json", ".swayprog.json", serialize_program(export_program(snap->document, tl, snap->id))};
    case ExportFlavor::Script:
      return {"text/javascript", ".mjs", emit_runtime_script(export_program(snap->document, tl, snap->id))};
    case ExportFlavor::Baked: {
      if (tl.tracks.empty()) throw Error(ErrorCode::EmptyTimeline, "timeline has no tracks");
      const auto baked = bake_css(snap->document, tl, assign_timeline(snap->document, tl, true));
      return {"image/svg+xml", ".svg", baked.standalone_svg()};
    }
  }
  throw Error(ErrorCode::SchemaViolation, "unknown export flavor", "$.flavor");
}

CheckReport SessionService::check(const std::string& id, VersionId version) {
  return check_version(*session(id), version);
}

std::shared_ptr<ModelClient> client_from_env(const std::filesystem::path& stub_dir) {
  if (auto config = HttpClientConfig::from_env()) return std::make_shared<HttpClient>(*config);
  return std::make_shared<StubClient>(stub_dir);
}

ServiceOptions options_from_env() {
  ServiceOptions o;
  if (const char* b = std::getenv("SWAY_CONTEXT_BUDGET"); b && *b) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(b, &end, 10);
    if (*end != '\0' || v == 0)
      throw Error(ErrorCode::SchemaViolation, "SWAY_CONTEXT_BUDGET must be a positive integer", "SWAY_CONTEXT_BUDGET");
    o.context_budget = static_cast<std::size_t>(v);
  }
  return o;
}

}  // namespace sway
