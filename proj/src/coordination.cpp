#include "sway/coordination.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sway/json_util.hpp"
#include "sway/random.hpp"

namespace sway {

namespace {

// Values closer than this (relative) are the same value seen through
// floating-point noise, e.g. equal circles under a non-dyadic scale.
constexpr double kRelativeTieTolerance = 1e-12;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::InvalidScheme, "invalid coordination scheme: " + what, what);
}

void check_relative(const Point& p, const std::string& name) {
  if (!std::isfinite(p.x()) || !std::isfinite(p.y())) invalid(name + " is not finite");
  if (p.x() < 0 || p.x() > 1 || p.y() < 0 || p.y() > 1)
    invalid(name + " lies outside the viewBox-relative unit square");
}

std::string direction_name(Direction d) { return d == Direction::Ascending ? "ascending" : "descending"; }

Direction parse_direction(const nlohmann::json& obj, const std::string& path) {
  if (!obj.contains("direction")) return Direction::Ascending;
  auto s = json_util::string_field(obj, "direction", path);
  if (s == "ascending") return Direction::Ascending;
  if (s == "descending") return Direction::Descending;
  json_util::violation(json_util::child(path, "direction"), "expected ascending|descending");
}

}  // namespace

void validate_scheme(const CoordinationScheme& scheme) {
  std::visit(overloaded{
                 [](const DataCentric& s) {
                   if (s.attribute && s.attribute->empty()) invalid("data attribute name is empty");
                 },
                 [](const LayoutRadius& s) { check_relative(s.center, "center"); },
                 [](const LayoutProjection& s) {
                   check_relative(s.start, "start");
                   check_relative(s.end, "end");
                   if (s.start == s.end) invalid("projection start equals end");
                 },
                 [](const LayoutSketch& s) {
                   if (s.polyline.size() < 2) invalid("polyline too short");
                   for (std::size_t i = 0; i < s.polyline.size(); ++i)
                     check_relative(s.polyline[i], "polyline[" + std::to_string(i) + "]");
                   if (!(polyline_length(s.polyline) > 0)) invalid("polyline has zero length");
                 },
                 [](const LayerCentric&) {},
                 [](const RandomOrder& s) {
                   if (s.seed > kMaxSeed) invalid("seed exceeds 2^53-1");
                 },
             },
             scheme);
}

std::string mode_name(const CoordinationScheme& scheme) {
  return std::visit(overloaded{
                        [](const DataCentric&) { return std::string("data-centric"); },
                        [](const LayoutRadius&) { return std::string("layout-radius"); },
                        [](const LayoutProjection&) { return std::string("layout-projection"); },
                        [](const LayoutSketch&) { return std::string("layout-sketch"); },
                        [](const LayerCentric&) { return std::string("layer-centric"); },
                        [](const RandomOrder&) { return std::string("random"); },
                    },
                    scheme);
}

nlohmann::json scheme_to_json(const CoordinationScheme& scheme) {
  using nlohmann::json;
  json j = {{"mode", mode_name(scheme)}};
  std::visit(overloaded{
                 [&](const DataCentric& s) {
                   j["direction"] = direction_name(s.direction);
                   j["basis"] = s.basis == DataBasis::Rank ? "rank" : "value";
                   if (s.attribute) j["attribute"] = *s.attribute;
                 },
                 [&](const LayoutRadius& s) { j["center"] = json_util::to_json(s.center); },
                 [&](const LayoutProjection& s) {
                   j["start"] = json_util::to_json(s.start);
                   j["end"] = json_util::to_json(s.end);
                 },
                 [&](const LayoutSketch& s) {
                   json pts = json::array();
                   for (const auto& p : s.polyline) pts.push_back(json_util::to_json(p));
                   j["polyline"] = std::move(pts);
                 },
                 [&](const LayerCentric& s) { j["direction"] = direction_name(s.direction); },
                 [&](const RandomOrder& s) { j["seed"] = s.seed; },
             },
             scheme);
  return j;
}

CoordinationScheme scheme_from_json(const nlohmann::json& j, const std::string& path) {
  using namespace json_util;
  const auto mode = string_field(j, "mode", path);
  if (mode == "data-centric") {
    DataCentric s;
    s.direction = parse_direction(j, path);
    if (j.contains("basis")) {
      auto b = string_field(j, "basis", path);
      if (b == "rank") s.basis = DataBasis::Rank;
      else if (b == "value") s.basis = DataBasis::Value;
      else violation(child(path, "basis"), "expected rank|value");
    }
    if (j.contains("attribute") && !j["attribute"].is_null())
      s.attribute = string_field(j, "attribute", path);
    return s;
  }
  if (mode == "layout-radius") return LayoutRadius{point(field(j, "center", path), child(path, "center"))};
  if (mode == "layout-projection")
    return LayoutProjection{point(field(j, "start", path), child(path, "start")),
                            point(field(j, "end", path), child(path, "end"))};
  if (mode == "layout-sketch") {
    LayoutSketch s;
    const auto pp = child(path, "polyline");
    const auto& pts = array(field(j, "polyline", path), pp);
    for (std::size_t i = 0; i < pts.size(); ++i) s.polyline.push_back(point(pts[i], child(pp, i)));
    return s;
  }
  if (mode == "layer-centric") return LayerCentric{parse_direction(j, path)};
  if (mode == "random") return RandomOrder{uint_field(j, "seed", path)};
  violation(child(path, "mode"), "unknown coordination mode '" + mode + "'");
}

Point to_user(const Rect& viewbox, const Point& relative) {
  return {viewbox.min_x + relative.x() * viewbox.width(),
          viewbox.min_y + relative.y() * viewbox.height()};
}

Point to_relative(const Rect& viewbox, const Point& user) {
  return {(user.x() - viewbox.min_x) / viewbox.width(),
          (user.y() - viewbox.min_y) / viewbox.height()};
}

std::optional<double> WeightAssignment::weight_of(ElementIndex element) const {
  auto it = std::lower_bound(elements.begin(), elements.end(), element);
  if (it == elements.end() || *it != element) return std::nullopt;
  return weights[static_cast<std::size_t>(it - elements.begin())];
}

double WeightAssignment::max_weight() const {
  return weights.empty() ? 0.0 : *std::max_element(weights.begin(), weights.end());
}

std::vector<double> normalize(std::span<const double> raw) {
  std::vector<double> out(raw.size(), 0.0);
  if (raw.empty()) return out;
  const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  const double range = *hi - *lo;
  const double magnitude = std::max(std::abs(*hi), std::abs(*lo));
  if (!(range > kRelativeTieTolerance * magnitude)) return out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out[i] = raw[i] == *hi ? 1.0 : std::clamp((raw[i] - *lo) / range, 0.0, 1.0);
  }
  return out;
}

double random_weight(std::uint64_t seed, ElementIndex element) {
  return unit_interval(splitmix64(seed ^ static_cast<std::uint64_t>(element)));
}

WeightAssignment assign_weights(const VectorDocument& doc, const std::string& group,
                                const CoordinationScheme& scheme) {
  validate_scheme(scheme);
  WeightAssignment out;
  out.group = group;
  out.scheme = scheme;
  out.elements = select_group(doc, group);
  if (out.elements.empty())
    throw Error(ErrorCode::EmptyGroup, "group '" + group + "' matches no elements", group);
  const std::size_t n = out.elements.size();

  auto midpoints = [&] {
    std::vector<Point> pts;
    pts.reserve(n);
    for (auto e : out.elements) pts.push_back(midpoint(doc, e));
    return pts;
  };

  std::vector<double> raw(n, 0.0);
  std::visit(
      overloaded{
          [&](const DataCentric& s) {
            std::vector<double> values(n);
            for (std::size_t i = 0; i < n; ++i) values[i] = data_value(doc, out.elements[i], s.attribute);
            if (s.basis == DataBasis::Value) {
              for (std::size_t i = 0; i < n; ++i)
                raw[i] = s.direction == Direction::Descending ? -values[i] : values[i];
              return;
            }
            std::vector<std::size_t> order(n);
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
              return s.direction == Direction::Ascending ? values[a] < values[b] : values[a] > values[b];
            });
            for (std::size_t r = 0; r < n; ++r) raw[order[r]] = static_cast<double>(r);
          },
          [&](const LayoutRadius& s) {
            const Point c = to_user(doc.viewbox, s.center);
            auto pts = midpoints();
            for (std::size_t i = 0; i < n; ++i) raw[i] = radial_score(pts[i], c);
          },
          [&](const LayoutProjection& s) {
            const Point a = to_user(doc.viewbox, s.start), b = to_user(doc.viewbox, s.end);
            auto pts = midpoints();
            for (std::size_t i = 0; i < n; ++i) raw[i] = project_on_line(pts[i], a, b);
          },
          [&](const LayoutSketch& s) {
            std::vector<Point> path;
            for (const auto& p : s.polyline) path.push_back(to_user(doc.viewbox, p));
            auto pts = midpoints();
            for (std::size_t i = 0; i < n; ++i) raw[i] = sketch_progress(pts[i], path);
          },
          [&](const LayerCentric& s) {
            for (std::size_t i = 0; i < n; ++i)
              raw[i] = static_cast<double>(s.direction == Direction::Ascending ? i : n - 1 - i);
          },
          [&](const RandomOrder&) {},
      },
      scheme);

  if (const auto* r = std::get_if<RandomOrder>(&scheme)) {
    out.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.weights[i] = random_weight(r->seed, out.elements[i]);
  } else {
    out.weights = normalize(raw);
  }
  return out;
}

}  // namespace sway
