#include "sway/exporter.hpp"

#include <algorithm>
#include <map>
#include <numbers>
#include <regex>
#include <set>

#include "sway/error.hpp"
#include "sway/json_util.hpp"
#include "sway_runtime_js.hpp"

namespace sway {

namespace {

void check_tracks(const Timeline& timeline) {
  for (const auto& g : timeline.tracks) {
    validate_scheme(g.coordination);
    validate_timing(g.delay_ms, g.duration_ms, g.offset_ms);
  }
}

nlohmann::json rect_to_json(const Rect& r) {
  return {{"min_x", r.min_x}, {"min_y", r.min_y}, {"max_x", r.max_x}, {"max_y", r.max_y}};
}

Rect rect_from_json(const nlohmann::json& j, const std::string& path) {
  using namespace json_util;
  Rect r{number_field(j, "min_x", path), number_field(j, "min_y", path), number_field(j, "max_x", path),
         number_field(j, "max_y", path)};
  if (!(r.width() > 0 && r.height() > 0)) violation(path, "viewBox must have positive width and height");
  return r;
}

}  // namespace

AnimationProgram export_program(const VectorDocument& doc, const Timeline& timeline, const std::string& session_id) {
  if (timeline.tracks.empty()) throw Error(ErrorCode::EmptyTimeline, "timeline has no tracks");
  check_tracks(timeline);
  AnimationProgram p;
  p.viewbox_ref = doc.viewbox;
  p.tracks = timeline.tracks;
  p.provenance = {session_id, timeline.version_id, doc.source_digest};
  return p;
}

nlohmann::json program_to_json(const AnimationProgram& program) {
  nlohmann::json tracks = nlohmann::json::array();
  for (const auto& g : program.tracks) tracks.push_back(group_clip_to_json(g));
  const auto& pv = program.provenance;
  return {{"format_version", program.format_version},
          {"viewbox_ref", rect_to_json(program.viewbox_ref)},
          {"tracks", std::move(tracks)},
          {"provenance",
           {{"session_id", pv.session_id},
            {"version_id", pv.version_id ? nlohmann::json(*pv.version_id) : nlohmann::json(nullptr)},
            {"source_digest", pv.source_digest}}}};
}

std::string serialize_program(const AnimationProgram& program) { return canonical_dump(program_to_json(program)); }

AnimationProgram import_program(std::string_view json_text) {
  using namespace json_util;
  const auto j = json::parse(json_text.begin(), json_text.end(), nullptr, false);
  if (j.is_discarded()) violation("$", "not valid JSON");
  object(j, "$");

  AnimationProgram p;
  p.format_version = string_field(j, "format_version", "$");
  static const std::regex semver(R"((\d+)\.(\d+)\.(\d+))");
  std::smatch m;
  if (!std::regex_match(p.format_version, m, semver))
    violation("$.format_version", "expected a MAJOR.MINOR.PATCH version");
  if (m[1].str() != "1")
    throw Error(ErrorCode::UnsupportedVersion,
                "program format " + p.format_version + " is not supported (expected 1.x.y)", p.format_version);

  p.viewbox_ref = rect_from_json(field(j, "viewbox_ref", "$"), "$.viewbox_ref");

  const auto& tracks = array(field(j, "tracks", "$"), "$.tracks");
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    const auto path = child("$.tracks", i);
    GroupClip g = group_clip_from_json(tracks[i], path);
    try {
      validate_scheme(g.coordination);
    } catch (const Error& e) {
      violation(child(path, "coordination"), e.what());
    }
    p.tracks.push_back(std::move(g));
  }

  const auto& pv = object(field(j, "provenance", "$"), "$.provenance");
  p.provenance.session_id = string_field(pv, "session_id", "$.provenance");
  const auto& vid = field(pv, "version_id", "$.provenance");
  if (!vid.is_null()) p.provenance.version_id = uint_field(pv, "version_id", "$.provenance");
  p.provenance.source_digest = string_field(pv, "source_digest", "$.provenance");
  return p;
}

std::string emit_runtime_script(const AnimationProgram& program) {
  std::string out = "// Animation runtime. Call createAnimation(svgRoot) to get {play, pause, replay}.\n";
  out += "export const program = " + serialize_program(program) + ";\n";
  out += kRuntimeSource;
  return out;
}

// ---------------------------------------------------------------------------
// CSS baking

namespace {

bool is_transform(Property p) {
  return p == Property::TranslateX || p == Property::TranslateY || p == Property::Rotate || p == Property::Scale;
}

}  // namespace

std::string css_timing_function(Easing e) {
  switch (e) {
    case Easing::Linear: return "linear";
    case Easing::EaseInQuad: return "cubic-bezier(" + format_number(1.0 / 3) + ",0," + format_number(2.0 / 3) + "," +
                                    format_number(1.0 / 3) + ")";
    case Easing::EaseOutQuad: return "cubic-bezier(" + format_number(1.0 / 3) + "," + format_number(2.0 / 3) + "," +
                                     format_number(2.0 / 3) + ",1)";
    case Easing::EaseInOutCubic: return "cubic-bezier(0.65,0,0.35,1)";
    case Easing::SineInOut: return "cubic-bezier(0.37,0,0.63,1)";
  }
  return "linear";
}

namespace {

std::string percent(double offset) { return format_number(offset * 100) + "%"; }

std::string css_declaration(Property p, const PropertyValue& v) {
  switch (p) {
    case Property::Opacity: return "opacity: " + format_number(std::get<double>(v));
    case Property::FillColor: return "fill: " + to_hex(std::get<Color>(v));
    case Property::StrokeColor: return "stroke: " + to_hex(std::get<Color>(v));
    case Property::StrokeWidth: return "stroke-width: " + format_number(std::get<double>(v)) + "px";
    case Property::FilterBlur: return "filter: blur(" + format_number(std::get<double>(v)) + "px)";
    default: return {};
  }
}

std::string css_matrix(const AffineTransform& t) {
  const auto& m = t.matrix();
  return "matrix(" + format_number(m(0, 0)) + "," + format_number(m(1, 0)) + "," + format_number(m(0, 1)) + "," +
         format_number(m(1, 1)) + "," + format_number(m(0, 2)) + "," + format_number(m(1, 2)) + ")";
}

struct TransformPlan {
  std::vector<double> offsets;
  std::vector<Easing> easings;
  std::map<Property, std::vector<double>> values;  // per offset
};

// The transform tracks of one clip, provided they share keyframe timing.
std::optional<TransformPlan> plan_transform(const ClipSpec& clip) {
  const PropertyTrack* first = nullptr;
  TransformPlan plan;
  for (const auto& t : clip.tracks) {
    if (!is_transform(t.property)) continue;
    if (!first) {
      first = &t;
      for (const auto& k : t.keyframes) {
        plan.offsets.push_back(k.offset);
        plan.easings.push_back(k.easing_out);
      }
    } else {
      if (t.keyframes.size() != first->keyframes.size()) return std::nullopt;
      for (std::size_t i = 0; i < t.keyframes.size(); ++i)
        if (t.keyframes[i].offset != plan.offsets[i] || t.keyframes[i].easing_out != plan.easings[i])
          return std::nullopt;
    }
    auto& vals = plan.values[t.property];
    for (const auto& k : t.keyframes) vals.push_back(std::get<double>(k.value));
  }
  if (!first) return TransformPlan{};
  return plan;
}

std::set<Property> transform_properties(const ClipSpec& clip) {
  std::set<Property> out;
  for (const auto& t : clip.tracks)
    if (is_transform(t.property)) out.insert(t.property);
  return out;
}

struct ElementAnimation {
  std::string name;
  double duration_ms;
  double delay_ms;
  bool loop;
};

}  // namespace

std::string BakedAnimation::standalone_svg() const {
  std::string out = svg;
  out.insert(root_content_begin, "<style>\n" + css + "</style>");
  return out;
}

BakedAnimation bake_css(const VectorDocument& doc, const Timeline& timeline,
                        std::span<const WeightAssignment> assignments) {
  if (assignments.size() != timeline.tracks.size())
    throw Error(ErrorCode::MissingAssignment, "one weight assignment per track is required");
  for (std::size_t i = 0; i < assignments.size(); ++i)
    if (assignments[i].group != timeline.tracks[i].clip.selector ||
        !(assignments[i].scheme == timeline.tracks[i].coordination))
      throw Error(ErrorCode::MissingAssignment,
                  "assignment " + std::to_string(i) + " does not match its track", std::to_string(i));

  std::vector<std::string> problems;
  std::vector<std::optional<TransformPlan>> plans;
  std::map<ElementIndex, std::pair<std::size_t, std::set<Property>>> transform_owner;
  for (std::size_t i = 0; i < timeline.tracks.size(); ++i) {
    const auto& clip = timeline.tracks[i].clip;
    const std::string label = "track " + std::to_string(i) + " (" + clip.selector + ")";
    if (assignments[i].elements.empty())
      problems.push_back(label + " matches no elements, so its targets exist only at runtime");
    plans.push_back(plan_transform(clip));
    if (!plans.back())
      problems.push_back(label + " has transform tracks with different keyframe timing");
    const auto props = transform_properties(clip);
    if (props.empty()) continue;
    for (auto e : assignments[i].elements) {
      auto [it, inserted] = transform_owner.try_emplace(e, i, props);
      if (!inserted && it->second.second != props)
        problems.push_back(label + " and track " + std::to_string(it->second.first) +
                           " animate different transform properties of element " + std::to_string(e));
      it->second = {i, props};
    }
  }
  if (!problems.empty()) {
    std::string detail;
    for (const auto& p : problems) detail += (detail.empty() ? "" : "; ") + p;
    throw Error(ErrorCode::UnbakeableFeature, "animation cannot be expressed in CSS: " + detail, detail);
  }

  BakedAnimation out;
  std::string keyframes;
  std::map<ElementIndex, std::vector<ElementAnimation>> per_element;
  std::set<std::string> emitted;

  for (std::size_t i = 0; i < timeline.tracks.size(); ++i) {
    const auto& g = timeline.tracks[i];
    const auto& plan = *plans[i];

    for (const auto& t : g.clip.tracks) {
      if (is_transform(t.property)) continue;
      const std::string name = "sway-" + std::to_string(i) + "-" + std::string(property_name(t.property));
      std::string body = "@keyframes " + name + " {\n";
      for (const auto& k : t.keyframes) {
        body += "  " + percent(k.offset) + " { " + css_declaration(t.property, k.value) + ";";
        if (k.easing_out != Easing::Linear) body += " animation-timing-function: " + css_timing_function(k.easing_out) + ";";
        body += " }\n";
      }
      body += "}\n";
      keyframes += body;
      for (std::size_t n = 0; n < assignments[i].size(); ++n) {
        const double delay = element_start_time(g.delay_ms, g.offset_ms, assignments[i].weights[n]);
        per_element[assignments[i].elements[n]].push_back({name, g.duration_ms, delay, g.clip.loop});
      }
    }

    for (std::size_t n = 0; n < assignments[i].size(); ++n) {
      const ElementIndex index = assignments[i].elements[n];
      const double delay = element_start_time(g.delay_ms, g.offset_ms, assignments[i].weights[n]);
      out.delays.push_back({i, index, delay});
      if (plan.offsets.empty()) continue;

      const auto& e = doc.element(index);
      Point c = e.root_transform * Point(0, 0);
      try {
        c = bounding_box(doc, index).center();
      } catch (const Error&) {
      }
      const AffineTransform parent = e.parent ? doc.element(*e.parent).root_transform : AffineTransform::Identity();
      AffineTransform head = parent.inverse(Eigen::Affine);
      head.translate(c);
      AffineTransform tail = AffineTransform::Identity();
      tail.translate(-c);
      tail = tail * parent * e.local_transform;
      const std::string pre = css_matrix(head), post = css_matrix(tail);

      auto value = [&](Property p, std::size_t k, double fallback) {
        auto it = plan.values.find(p);
        return it == plan.values.end() ? fallback : it->second[k];
      };
      std::string body;
      for (std::size_t k = 0; k < plan.offsets.size(); ++k) {
        body += "  " + percent(plan.offsets[k]) + " { transform: " + pre + " translate(" +
                format_number(value(Property::TranslateX, k, 0)) + "px," +
                format_number(value(Property::TranslateY, k, 0)) + "px) rotate(" +
                format_number(value(Property::Rotate, k, 0)) + "deg) scale(" +
                format_number(value(Property::Scale, k, 1)) + ") " + post + ";";
        if (plan.easings[k] != Easing::Linear)
          body += " animation-timing-function: " + css_timing_function(plan.easings[k]) + ";";
        body += " }\n";
      }
      const std::string name = "sway-" + std::to_string(i) + "-transform-" + std::to_string(index);
      if (emitted.insert(name).second) keyframes += "@keyframes " + name + " {\n" + body + "}\n";
      per_element[index].push_back({name, g.duration_ms, delay, g.clip.loop});
    }
  }

  std::string rules;
  std::set<ElementIndex> transformed;
  for (const auto& [e, owner] : transform_owner) transformed.insert(e);
  for (const auto& [index, anims] : per_element) {
    rules += "[data-sway=\"" + std::to_string(index) + "\"] {\n  animation: ";
    for (std::size_t a = 0; a < anims.size(); ++a) {
      const auto& an = anims[a];
      if (a) rules += ",\n    ";
      rules += an.name + " " + format_number(an.duration_ms) + "ms linear " + format_number(an.delay_ms) + "ms " +
               (an.loop ? "infinite" : "1") + " both";
    }
    rules += ";\n";
    if (transformed.count(index)) rules += "  transform-box: view-box;\n  transform-origin: 0 0;\n";
    rules += "}\n";
  }

  out.css =
      "/* Generated animation. Element start times were computed from the weights at export time and do not "
      "follow later changes to the data or the layout. */\n" +
      keyframes + rules;

  std::vector<std::pair<std::size_t, std::string>> inserts;
  for (const auto& [index, anims] : per_element) {
    const auto& e = doc.element(index);
    inserts.emplace_back(e.source_begin + 1 + e.tag.size(), " data-sway=\"" + std::to_string(index) + "\"");
  }
  out.svg = doc.source;
  for (auto it = inserts.rbegin(); it != inserts.rend(); ++it) out.svg.insert(it->first, it->second);

  const auto& root = doc.element(0);
  std::size_t shift = 0;
  for (const auto& [pos, text] : inserts)
    if (pos < root.source_start_tag_end) shift += text.size();
  out.root_content_begin = root.source_start_tag_end + shift;
  return out;
}

}  // namespace sway
