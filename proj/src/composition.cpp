#include "sway/composition.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

#include "sway/error.hpp"

namespace sway {

namespace {

void require_assignments(const Timeline& timeline, std::span<const WeightAssignment> assignments) {
  for (std::size_t i = 0; i < timeline.tracks.size(); ++i) {
    const auto& track = timeline.tracks[i];
    if (i >= assignments.size() || assignments[i].group != track.clip.selector ||
        assignments[i].scheme != track.coordination) {
      throw Error(ErrorCode::MissingAssignment,
                  "track " + std::to_string(i) + " (" + track.clip.selector + ") has no weight assignment",
                  std::to_string(i));
    }
  }
}

double scalar_or(const PropertyValues& values, Property p, double fallback) {
  auto it = values.find(p);
  if (it == values.end()) return fallback;
  if (const auto* d = std::get_if<double>(&it->second)) return *d;
  return fallback;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string without_style_property(std::string_view style, std::string_view property) {
  std::string out;
  std::size_t pos = 0;
  while (pos <= style.size()) {
    std::size_t semi = style.find(';', pos);
    if (semi == std::string_view::npos) semi = style.size();
    auto decl = style.substr(pos, semi - pos);
    auto colon = decl.find(':');
    const bool drop = colon != std::string_view::npos && trim(decl.substr(0, colon)) == property;
    if (!drop && !trim(decl).empty()) {
      if (!out.empty()) out += ';';
      out += trim(decl);
    }
    pos = semi + 1;
  }
  return out;
}

class TagEditor {
 public:
  explicit TagEditor(const ElementNode& e) : attrs_(e.attributes) {}

  void set(std::string_view name, std::string value) {
    for (auto& a : attrs_) {
      if (a.name == name) {
        a.value = std::move(value);
        return;
      }
    }
    attrs_.push_back({std::string(name), std::move(value)});
  }

  // Presentation attributes lose to inline style, so the style declaration goes.
  void set_presentation(std::string_view name, std::string value) {
    for (auto it = attrs_.begin(); it != attrs_.end(); ++it) {
      if (it->name != "style") continue;
      it->value = without_style_property(it->value, name);
      if (it->value.empty()) attrs_.erase(it);
      break;
    }
    set(name, std::move(value));
  }

  std::string start_tag(const ElementNode& e, bool self_closing) const {
    std::string out = "<" + e.tag;
    for (const auto& a : attrs_) out += " " + a.name + "=\"" + xml::escape_attribute(a.value) + "\"";
    out += self_closing ? "/>" : ">";
    return out;
  }

 private:
  std::vector<xml::Attribute> attrs_;
};

std::optional<Color> paint_color(const VectorDocument& doc, ElementIndex element, std::string_view property,
                                 std::string_view fallback) {
  auto v = presentation_value(doc, element, property);
  return parse_color(v ? *v : std::string(fallback));
}

double length_value(const std::optional<std::string>& text, double fallback) {
  if (!text) return fallback;
  std::string_view s = trim(*text);
  if (s.size() > 2 && s.substr(s.size() - 2) == "px") s.remove_suffix(2);
  return parse_number(s).value_or(fallback);
}

}  // namespace

Timeline arrange(const Timeline& timeline, std::size_t track, double delay_ms, double duration_ms) {
  if (track >= timeline.tracks.size())
    throw Error(ErrorCode::UnknownTrack,
                "track " + std::to_string(track) + " does not exist (" +
                    std::to_string(timeline.tracks.size()) + " tracks)",
                std::to_string(track));
  validate_timing(delay_ms, duration_ms, timeline.tracks[track].offset_ms);
  Timeline out = timeline;
  out.tracks[track].delay_ms = delay_ms;
  out.tracks[track].duration_ms = duration_ms;
  return out;
}

std::vector<WeightAssignment> assign_timeline(const VectorDocument& doc, const Timeline& timeline,
                                              bool allow_empty) {
  std::vector<WeightAssignment> out;
  out.reserve(timeline.tracks.size());
  for (const auto& track : timeline.tracks) {
    if (allow_empty && select_group(doc, track.clip.selector).empty()) {
      validate_scheme(track.coordination);
      out.push_back({track.clip.selector, track.coordination, {}, {}});
      continue;
    }
    out.push_back(assign_weights(doc, track.clip.selector, track.coordination));
  }
  return out;
}

double total_duration(const Timeline& timeline, std::span<const WeightAssignment> assignments) {
  require_assignments(timeline, assignments);
  double end = 0;
  for (std::size_t i = 0; i < timeline.tracks.size(); ++i) {
    const auto& g = timeline.tracks[i];
    end = std::max(end, element_start_time(g.delay_ms, g.offset_ms, assignments[i].max_weight()) +
                            g.duration_ms);
  }
  return end;
}

FrameSnapshot sample(const VectorDocument& doc, const Timeline& timeline,
                     std::span<const WeightAssignment> assignments, double t_ms) {
  require_assignments(timeline, assignments);
  FrameSnapshot snap;
  snap.time_ms = t_ms;
  for (std::size_t i = 0; i < timeline.tracks.size(); ++i) {
    const auto& g = timeline.tracks[i];
    const auto& a = assignments[i];
    for (std::size_t k = 0; k < a.elements.size(); ++k) {
      if (a.elements[k] >= doc.elements.size())
        throw Error(ErrorCode::MissingAssignment, "weight assignment does not match the document",
                    std::to_string(i));
      const double start = element_start_time(g.delay_ms, g.offset_ms, a.weights[k]);
      auto values = clip_value_at(g.clip, (t_ms - start) / g.duration_ms);
      auto& slot = snap.values[a.elements[k]];
      for (auto& [p, v] : values) slot.insert_or_assign(p, std::move(v));
    }
  }
  return snap;
}

std::optional<PropertyValue> base_value(const VectorDocument& doc, ElementIndex element, Property property) {
  switch (property) {
    case Property::TranslateX:
    case Property::TranslateY:
    case Property::Rotate:
    case Property::FilterBlur:
      return 0.0;
    case Property::Scale:
      return 1.0;
    case Property::Opacity:
      return length_value(presentation_value(doc, element, "opacity"), 1.0);
    case Property::StrokeWidth:
      return length_value(presentation_value(doc, element, "stroke-width"), 1.0);
    case Property::FillColor:
      if (auto c = paint_color(doc, element, "fill", "black")) return *c;
      return std::nullopt;
    case Property::StrokeColor:
      if (auto c = paint_color(doc, element, "stroke", "none")) return *c;
      return std::nullopt;
  }
  return std::nullopt;
}

VectorDocument render_static(const VectorDocument& doc, const FrameSnapshot& snapshot) {
  std::map<ElementIndex, std::string> tags;
  std::string filters;

  for (const auto& [index, values] : snapshot.values) {
    const ElementNode& e = doc.element(index);
    if (!e.rendered) continue;
    auto differs = [&](Property p) {
      auto it = values.find(p);
      return it != values.end() && base_value(doc, index, p) != std::optional<PropertyValue>(it->second);
    };

    TagEditor tag(e);
    bool edited = false;

    const double tx = scalar_or(values, Property::TranslateX, 0.0);
    const double ty = scalar_or(values, Property::TranslateY, 0.0);
    const double rot = scalar_or(values, Property::Rotate, 0.0);
    const double sc = scalar_or(values, Property::Scale, 1.0);
    if (tx != 0 || ty != 0 || rot != 0 || sc != 1) {
      Point c = e.root_transform * Point(0, 0);
      try {
        c = bounding_box(doc, index).center();
      } catch (const Error&) {
      }
      AffineTransform anim = AffineTransform::Identity();
      anim.translate(Eigen::Vector2d(tx, ty));
      anim.translate(c);
      anim.rotate(rot * std::numbers::pi / 180.0);
      anim.scale(sc);
      anim.translate(-c);
      const AffineTransform parent =
          e.parent ? doc.element(*e.parent).root_transform : AffineTransform::Identity();
      tag.set("transform", format_transform(parent.inverse(Eigen::Affine) * anim * parent * e.local_transform));
      edited = true;
    }
    for (auto [p, attr] : {std::pair{Property::Opacity, "opacity"}, std::pair{Property::StrokeWidth, "stroke-width"}}) {
      if (!differs(p)) continue;
      tag.set_presentation(attr, format_number(std::get<double>(values.at(p))));
      edited = true;
    }
    for (auto [p, attr] : {std::pair{Property::FillColor, "fill"}, std::pair{Property::StrokeColor, "stroke"}}) {
      if (!differs(p)) continue;
      tag.set_presentation(attr, to_hex(std::get<Color>(values.at(p))));
      edited = true;
    }
    if (differs(Property::FilterBlur)) {
      const double blur = std::get<double>(values.at(Property::FilterBlur));
      if (blur > 0) {
        const std::string id = "sway-blur-" + std::to_string(index);
        filters += "<filter id=\"" + id + "\"><feGaussianBlur stdDeviation=\"" + format_number(blur) +
                   "\"/></filter>";
        tag.set_presentation("filter", "url(#" + id + ")");
        edited = true;
      }
    }
    if (edited) {
      const bool self_closing = doc.source[e.source_start_tag_end - 2] == '/';
      tags.emplace(index, tag.start_tag(e, self_closing));
    }
  }

  if (tags.empty() && filters.empty()) return doc;

  struct Splice {
    std::size_t begin, end;
    std::string text;
  };
  std::vector<Splice> splices;
  const std::string defs = filters.empty() ? std::string() : "<defs>" + filters + "</defs>";
  const ElementNode& root = doc.element(0);
  // Appended as the root's last child so existing element indices stay valid.
  if (!defs.empty() && root.source_start_tag_end < root.source_end) {
    const std::size_t close = doc.source.rfind("</", root.source_end - 1);
    splices.push_back({close, close, defs});
  }
  for (auto& [index, text] : tags) {
    const ElementNode& e = doc.element(index);
    splices.push_back({e.source_begin, e.source_start_tag_end, text});
  }
  std::sort(splices.begin(), splices.end(), [](const Splice& a, const Splice& b) { return a.begin < b.begin; });

  std::string out;
  out.reserve(doc.source.size() + 256);
  std::size_t cursor = 0;
  for (const auto& s : splices) {
    out.append(doc.source, cursor, s.begin - cursor);
    out += s.text;
    cursor = s.end;
  }
  out.append(doc.source, cursor, std::string::npos);

  ParseOptions options;
  options.flattening_tolerance = doc.flattening_tolerance;
  return parse_document(std::move(out), doc.styles, options);
}

nlohmann::json property_value_to_json(const PropertyValue& v) {
  if (const auto* c = std::get_if<Color>(&v)) return to_hex(*c);
  return std::get<double>(v);
}

nlohmann::json snapshot_to_json(const FrameSnapshot& snapshot) {
  nlohmann::json values = nlohmann::json::object();
  for (const auto& [index, props] : snapshot.values) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [p, v] : props) j[std::string(property_name(p))] = property_value_to_json(v);
    values[std::to_string(index)] = std::move(j);
  }
  return {{"time", snapshot.time_ms}, {"values", std::move(values)}};
}

}  // namespace sway
