#include "sway/clip.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "sway/json_util.hpp"

namespace sway {

namespace {

constexpr std::array<std::string_view, 9> kPropertyNames{
    "translateX", "translateY", "rotate", "scale", "opacity",
    "fill-color", "stroke-color", "stroke-width", "filter-blur"};

constexpr std::array<std::string_view, 5> kEasingNames{
    "linear", "ease-in-quad", "ease-out-quad", "ease-in-out-cubic", "sine-in-out"};

std::uint8_t lerp_channel(std::uint8_t a, std::uint8_t b, double t) {
  const double v = std::floor(a + (static_cast<double>(b) - a) * t + 0.5);
  return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
}

PropertyValue lerp(const PropertyValue& a, const PropertyValue& b, double t) {
  if (const auto* ca = std::get_if<Color>(&a)) {
    const auto& cb = std::get<Color>(b);
    return Color{lerp_channel(ca->r, cb.r, t), lerp_channel(ca->g, cb.g, t),
                 lerp_channel(ca->b, cb.b, t)};
  }
  const double x = std::get<double>(a), y = std::get<double>(b);
  return x + (y - x) * t;
}

std::string track_path(std::size_t i) { return "$.tracks[" + std::to_string(i) + "]"; }

}  // namespace

std::string_view property_name(Property p) { return kPropertyNames[static_cast<std::size_t>(p)]; }

std::optional<Property> parse_property(std::string_view name) {
  for (std::size_t i = 0; i < kPropertyNames.size(); ++i)
    if (kPropertyNames[i] == name) return static_cast<Property>(i);
  return std::nullopt;
}

std::string_view easing_name(Easing e) { return kEasingNames[static_cast<std::size_t>(e)]; }

std::optional<Easing> parse_easing(std::string_view name) {
  for (std::size_t i = 0; i < kEasingNames.size(); ++i)
    if (kEasingNames[i] == name) return static_cast<Easing>(i);
  return std::nullopt;
}

double apply_easing(Easing easing, double u) {
  u = std::clamp(u, 0.0, 1.0);
  double v = u;
  switch (easing) {
    case Easing::Linear: v = u; break;
    case Easing::EaseInQuad: v = u * u; break;
    case Easing::EaseOutQuad: v = 1 - (1 - u) * (1 - u); break;
    case Easing::EaseInOutCubic:
      v = u < 0.5 ? 4 * u * u * u : 1 - std::pow(-2 * u + 2, 3) / 2;
      break;
    case Easing::SineInOut: v = -(std::cos(std::numbers::pi * u) - 1) / 2; break;
  }
  return std::clamp(v, 0.0, 1.0);
}

double apply_easing(std::string_view easing, double u) {
  auto e = parse_easing(easing);
  if (!e) throw Error(ErrorCode::UnknownEasing, "unknown easing '" + std::string(easing) + "'",
                      std::string(easing));
  return apply_easing(*e, u);
}

PropertyValue interpolate_track(const PropertyTrack& track, double u) {
  const auto& kfs = track.keyframes;
  if (kfs.empty()) throw std::invalid_argument("track has no keyframes");
  if (!(u > kfs.front().offset)) return kfs.front().value;
  if (!(u < kfs.back().offset)) return kfs.back().value;
  auto next = std::upper_bound(kfs.begin(), kfs.end(), u,
                               [](double x, const Keyframe& k) { return x < k.offset; });
  const Keyframe& b = *next;
  const Keyframe& a = *(next - 1);
  if (u == a.offset) return a.value;
  const double span = b.offset - a.offset;
  const double local = span > 0 ? (u - a.offset) / span : 1.0;
  return lerp(a.value, b.value, apply_easing(a.easing_out, local));
}

PropertyValues clip_value_at(const ClipSpec& clip, double local_u) {
  double u = local_u;
  if (!(u > 0)) {
    u = 0;
  } else if (u > 1) {
    u = clip.loop ? u - std::floor(u) : 1.0;
  }
  PropertyValues out;
  for (const auto& t : clip.tracks) out.insert_or_assign(t.property, interpolate_track(t, u));
  return out;
}

std::string_view diagnostic_name(DiagnosticKind kind) {
  switch (kind) {
    case DiagnosticKind::UnknownSelector: return "UnknownSelector";
    case DiagnosticKind::EmptySelector: return "EmptySelector";
    case DiagnosticKind::EmptyTitle: return "EmptyTitle";
    case DiagnosticKind::UnknownProperty: return "UnknownProperty";
    case DiagnosticKind::DuplicateTrack: return "DuplicateTrack";
    case DiagnosticKind::TooFewKeyframes: return "TooFewKeyframes";
    case DiagnosticKind::NonMonotoneOffsets: return "NonMonotoneOffsets";
    case DiagnosticKind::KeyframeBounds: return "KeyframeBounds";
    case DiagnosticKind::ColorOutOfRange: return "ColorOutOfRange";
    case DiagnosticKind::ValueKindMismatch: return "ValueKindMismatch";
    case DiagnosticKind::NonFiniteValue: return "NonFiniteValue";
    case DiagnosticKind::UnknownEasing: return "UnknownEasing";
    case DiagnosticKind::SchemaError: return "SchemaError";
  }
  return "Unknown";
}

std::vector<Diagnostic> validate_clip(const ClipSpec& clip) {
  std::vector<Diagnostic> out;
  if (clip.selector.empty() || clip.selector == ".")
    out.push_back({DiagnosticKind::EmptySelector, "$.selector", "selector is empty"});
  if (clip.title.empty()) out.push_back({DiagnosticKind::EmptyTitle, "$.title", "title is empty"});
  std::set<Property> seen;
  for (std::size_t i = 0; i < clip.tracks.size(); ++i) {
    const auto& t = clip.tracks[i];
    const auto path = track_path(i);
    const std::string name(property_name(t.property));
    if (!seen.insert(t.property).second)
      out.push_back({DiagnosticKind::DuplicateTrack, path, "second track for " + name});
    const auto& k = t.keyframes;
    if (k.size() < 2) {
      out.push_back({DiagnosticKind::TooFewKeyframes, path + ".keyframes",
                     name + " needs at least two keyframes"});
    }
    bool monotone = true;
    for (std::size_t j = 1; j < k.size(); ++j) monotone = monotone && k[j - 1].offset < k[j].offset;
    if (!monotone)
      out.push_back({DiagnosticKind::NonMonotoneOffsets, path + ".keyframes",
                     name + " keyframe offsets are not strictly increasing"});
    if (!k.empty() && (k.front().offset != 0.0 || k.back().offset != 1.0 ||
                       std::any_of(k.begin(), k.end(), [](const Keyframe& f) {
                         return !(f.offset >= 0.0 && f.offset <= 1.0);
                       })))
      out.push_back({DiagnosticKind::KeyframeBounds, path + ".keyframes",
                     name + " keyframes must span offsets 0 to 1"});
    for (std::size_t j = 0; j < k.size(); ++j) {
      const auto vpath = path + ".keyframes[" + std::to_string(j) + "].value";
      if (kind_of(k[j].value) != value_kind(t.property)) {
        out.push_back({DiagnosticKind::ValueKindMismatch, vpath, "wrong value kind for " + name});
      } else if (const auto* d = std::get_if<double>(&k[j].value); d && !std::isfinite(*d)) {
        out.push_back({DiagnosticKind::NonFiniteValue, vpath, "non-finite value"});
      }
    }
  }
  return out;
}

std::vector<Diagnostic> validate_clip(const ClipSpec& clip, const VectorDocument& doc) {
  auto out = validate_clip(clip);
  if (!clip.selector.empty() && select_group(doc, clip.selector).empty())
    out.insert(out.begin(), {DiagnosticKind::UnknownSelector, "$.selector",
                             "selector " + clip.selector + " matches no elements"});
  return out;
}

nlohmann::json clip_to_json(const ClipSpec& clip) {
  using nlohmann::json;
  json tracks = json::array();
  for (const auto& t : clip.tracks) {
    json kfs = json::array();
    for (const auto& k : t.keyframes) {
      json v = std::holds_alternative<Color>(k.value) ? json(to_hex(std::get<Color>(k.value)))
                                                      : json(std::get<double>(k.value));
      kfs.push_back({{"offset", k.offset}, {"value", v}, {"easing", easing_name(k.easing_out)}});
    }
    tracks.push_back({{"property", property_name(t.property)}, {"keyframes", std::move(kfs)}});
  }
  return {{"selector", clip.selector},
          {"title", clip.title},
          {"description", clip.description},
          {"loop", clip.loop},
          {"tracks", std::move(tracks)}};
}

ClipParse parse_clip(const nlohmann::json& j, const std::string& path) {
  ClipParse result;
  auto diag = [&](DiagnosticKind k, std::string p, std::string msg) {
    result.diagnostics.push_back({k, std::move(p), std::move(msg)});
  };
  if (!j.is_object()) {
    diag(DiagnosticKind::SchemaError, path, "clip must be an object");
    return result;
  }
  ClipSpec clip;
  auto text = [&](const char* key, bool required) -> std::string {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
      if (required) diag(DiagnosticKind::SchemaError, path + "." + key, "missing required field");
      return {};
    }
    if (!it->is_string()) {
      diag(DiagnosticKind::SchemaError, path + "." + key, "expected a string");
      return {};
    }
    return it->get<std::string>();
  };
  clip.selector = text("selector", true);
  clip.title = text("title", true);
  clip.description = text("description", false);
  if (auto it = j.find("loop"); it != j.end() && !it->is_null()) {
    if (it->is_boolean()) clip.loop = it->get<bool>();
    else diag(DiagnosticKind::SchemaError, path + ".loop", "expected a boolean");
  }

  auto tracks = j.find("tracks");
  if (tracks == j.end() || !tracks->is_array()) {
    diag(DiagnosticKind::SchemaError, path + ".tracks", "expected an array of tracks");
  } else {
    for (std::size_t i = 0; i < tracks->size(); ++i) {
      const auto& tj = (*tracks)[i];
      const auto tpath = path + ".tracks[" + std::to_string(i) + "]";
      if (!tj.is_object() || !tj.contains("property") || !tj["property"].is_string()) {
        diag(DiagnosticKind::SchemaError, tpath + ".property", "expected a property name");
        continue;
      }
      const auto pname = tj["property"].get<std::string>();
      auto prop = parse_property(pname);
      if (!prop) {
        diag(DiagnosticKind::UnknownProperty, tpath + ".property", "unknown property '" + pname + "'");
        continue;
      }
      PropertyTrack track;
      track.property = *prop;
      auto kfs = tj.find("keyframes");
      if (kfs == tj.end() || !kfs->is_array()) {
        diag(DiagnosticKind::SchemaError, tpath + ".keyframes", "expected an array of keyframes");
        continue;
      }
      for (std::size_t k = 0; k < kfs->size(); ++k) {
        const auto& kj = (*kfs)[k];
        const auto kpath = tpath + ".keyframes[" + std::to_string(k) + "]";
        Keyframe key;
        if (!kj.is_object() || !kj.contains("offset") || !kj["offset"].is_number()) {
          diag(DiagnosticKind::SchemaError, kpath + ".offset", "expected a numeric offset");
          continue;
        }
        key.offset = kj["offset"].get<double>();
        if (auto e = kj.find("easing"); e != kj.end() && !e->is_null()) {
          auto easing = e->is_string() ? parse_easing(e->get<std::string>()) : std::nullopt;
          if (!easing) {
            diag(DiagnosticKind::UnknownEasing, kpath + ".easing", "unknown easing " + e->dump());
            continue;
          }
          key.easing_out = *easing;
        }
        auto v = kj.find("value");
        const auto vpath = kpath + ".value";
        if (v == kj.end()) {
          diag(DiagnosticKind::SchemaError, vpath, "missing value");
          continue;
        }
        if (value_kind(*prop) == ValueKind::Scalar) {
          if (!v->is_number()) {
            diag(v->is_string() || v->is_array() ? DiagnosticKind::ValueKindMismatch
                                                 : DiagnosticKind::SchemaError,
                 vpath, pname + " expects a number");
            continue;
          }
          key.value = v->get<double>();
        } else if (v->is_string()) {
          auto c = parse_color(v->get<std::string>());
          if (!c) {
            diag(DiagnosticKind::SchemaError, vpath, "unparseable color " + v->dump());
            continue;
          }
          key.value = *c;
        } else if (v->is_array() && v->size() == 3) {
          Color c;
          bool ok = true;
          std::uint8_t* channels[3] = {&c.r, &c.g, &c.b};
          for (std::size_t ch = 0; ch < 3; ++ch) {
            const auto& cv = (*v)[ch];
            if (!cv.is_number()) {
              ok = false;
              diag(DiagnosticKind::SchemaError, vpath, "color channels must be numbers");
              break;
            }
            const double x = cv.get<double>();
            if (!(x >= 0 && x <= 255)) {
              ok = false;
              diag(DiagnosticKind::ColorOutOfRange, vpath,
                   "color channel " + cv.dump() + " outside [0,255]");
              break;
            }
            *channels[ch] = static_cast<std::uint8_t>(std::floor(x + 0.5));
          }
          if (!ok) continue;
          key.value = c;
        } else {
          diag(v->is_number() ? DiagnosticKind::ValueKindMismatch : DiagnosticKind::SchemaError,
               vpath, pname + " expects a color");
          continue;
        }
        track.keyframes.push_back(key);
      }
      clip.tracks.push_back(std::move(track));
    }
  }

  if (result.diagnostics.empty()) {
    result.diagnostics = validate_clip(clip);
    for (auto& d : result.diagnostics)
      if (d.path.rfind("$", 0) == 0) d.path = path + d.path.substr(1);
  }
  const bool structural_ok =
      std::none_of(result.diagnostics.begin(), result.diagnostics.end(),
                   [](const Diagnostic& d) { return is_structural(d.kind); });
  if (structural_ok) result.clip = std::move(clip);
  return result;
}

void validate_timing(double delay_ms, double duration_ms, double offset_ms) {
  if (!std::isfinite(delay_ms) || delay_ms < 0)
    throw Error(ErrorCode::InvalidDuration, "delay must be >= 0 ms", "delay");
  if (!std::isfinite(duration_ms) || duration_ms <= 0)
    throw Error(ErrorCode::InvalidDuration, "duration must be > 0 ms", "duration");
  if (!std::isfinite(offset_ms) || offset_ms < 0)
    throw Error(ErrorCode::InvalidDuration, "offset must be >= 0 ms", "offset");
}

nlohmann::json group_clip_to_json(const GroupClip& g) {
  return {{"clip", clip_to_json(g.clip)},
          {"delay", g.delay_ms},
          {"duration", g.duration_ms},
          {"offset", g.offset_ms},
          {"coordination", scheme_to_json(g.coordination)}};
}

GroupClip group_clip_from_json(const nlohmann::json& j, const std::string& path) {
  using namespace json_util;
  object(j, path);
  GroupClip g;
  auto parsed = parse_clip(field(j, "clip", path), child(path, "clip"));
  if (!parsed.clip) {
    const auto& d = parsed.diagnostics.front();
    violation(d.path, std::string(diagnostic_name(d.kind)) + ": " + d.message);
  }
  g.clip = std::move(*parsed.clip);
  g.delay_ms = number_field(j, "delay", path);
  g.duration_ms = number_field(j, "duration", path);
  g.offset_ms = number_field(j, "offset", path);
  try {
    validate_timing(g.delay_ms, g.duration_ms, g.offset_ms);
  } catch (const Error& e) {
    violation(child(path, e.detail()), e.what());
  }
  g.coordination = scheme_from_json(field(j, "coordination", path), child(path, "coordination"));
  try {
    validate_scheme(g.coordination);
  } catch (const Error& e) {
    violation(child(path, "coordination"), e.what());
  }
  return g;
}

}  // namespace sway
