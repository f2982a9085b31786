#include "sway/svg_model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "sway/digest.hpp"
#include "sway/error.hpp"

namespace sway {

bool ElementNode::has_class(std::string_view name) const {
  return std::find(classes.begin(), classes.end(), name) != classes.end();
}

const std::string* ElementNode::attribute(std::string_view name) const {
  for (const auto& a : attributes)
    if (a.name == name) return &a.value;
  return nullptr;
}

const ElementNode& VectorDocument::element(ElementIndex i) const {
  if (i >= elements.size())
    throw std::out_of_range("element index " + std::to_string(i) + " out of range");
  return elements[i];
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Reads comma/whitespace separated numbers in SVG's compact grammar
// ("10-5.5.5" is three numbers).
class NumberScanner {
 public:
  explicit NumberScanner(std::string_view s) : s_(s) {}

  void skip_separators() {
    while (pos_ < s_.size() &&
           (std::isspace(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == ','))
      ++pos_;
  }

  bool at_end() {
    skip_separators();
    return pos_ >= s_.size();
  }

  char peek() {
    skip_separators();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  void advance() { ++pos_; }

  bool at_number() {
    char c = peek();
    return std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.';
  }

  std::optional<double> number() {
    skip_separators();
    std::size_t start = pos_;
    if (start < s_.size() && s_[start] == '+') ++start;
    double v = 0;
    auto [ptr, ec] = std::from_chars(s_.data() + start, s_.data() + s_.size(), v);
    if (ec != std::errc{}) return std::nullopt;
    pos_ = static_cast<std::size_t>(ptr - s_.data());
    return v;
  }

  std::optional<bool> flag() {
    skip_separators();
    if (pos_ >= s_.size()) return std::nullopt;
    char c = s_[pos_];
    if (c != '0' && c != '1') return std::nullopt;
    ++pos_;
    return c == '1';
  }

  std::size_t position() const { return pos_; }
  std::string_view rest() const { return s_.substr(pos_); }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

double unit_factor(std::string_view unit) {
  if (unit.empty() || unit == "px") return 1.0;
  if (unit == "pt") return 4.0 / 3.0;
  if (unit == "pc") return 16.0;
  if (unit == "mm") return 96.0 / 25.4;
  if (unit == "cm") return 96.0 / 2.54;
  if (unit == "in") return 96.0;
  if (unit == "em") return 16.0;
  return std::numeric_limits<double>::quiet_NaN();
}

// `percent_base` is what 100% resolves to.
std::optional<double> parse_length(std::string_view text, double percent_base) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  std::size_t start = text.front() == '+' ? 1 : 0;
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data() + start, text.data() + text.size(), v);
  if (ec != std::errc{}) return std::nullopt;
  auto unit = trim(text.substr(static_cast<std::size_t>(ptr - text.data())));
  if (unit == "%") return v * percent_base / 100.0;
  double f = unit_factor(unit);
  if (std::isnan(f)) return std::nullopt;
  return v * f;
}

double length_attr(const xml::Node& n, std::string_view name, double percent_base,
                   double fallback = 0.0) {
  const auto* v = n.attribute(name);
  if (!v) return fallback;
  return parse_length(*v, percent_base).value_or(fallback);
}

// Appends points of an elliptical arc, excluding the start point.
void append_arc(Polygon& out, const Point& center, double rx, double ry, double phi,
                double theta1, double dtheta, double tolerance) {
  const double r = std::max(rx, ry);
  int n = 1;
  if (r > tolerance) {
    double step = 2.0 * std::acos(std::clamp(1.0 - tolerance / r, -1.0, 1.0));
    n = std::max(1, static_cast<int>(std::ceil(std::abs(dtheta) / step)));
  } else {
    n = std::max(1, static_cast<int>(std::ceil(std::abs(dtheta) / (std::numbers::pi / 2))));
  }
  const double c = std::cos(phi), s = std::sin(phi);
  for (int i = 1; i <= n; ++i) {
    const double t = theta1 + dtheta * static_cast<double>(i) / n;
    const double x = rx * std::cos(t), y = ry * std::sin(t);
    out.emplace_back(center.x() + c * x - s * y, center.y() + s * x + c * y);
  }
}

// Full ellipse with segment count a multiple of four so the axis extremes are
// vertices.
Polygon ellipse_polygon(const Point& center, double rx, double ry, double tolerance) {
  const double r = std::max(rx, ry);
  int n = 8;
  if (r > tolerance) {
    double step = 2.0 * std::acos(std::clamp(1.0 - tolerance / r, -1.0, 1.0));
    n = std::max(8, static_cast<int>(std::ceil(2.0 * std::numbers::pi / step)));
  }
  n = (n + 3) / 4 * 4;
  Polygon poly;
  poly.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double t = 2.0 * std::numbers::pi * i / n;
    double x = 0, y = 0;
    switch (i % (n / 4) == 0 ? i / (n / 4) : -1) {
      case 0: x = rx; break;
      case 1: y = ry; break;
      case 2: x = -rx; break;
      case 3: y = -ry; break;
      default: x = rx * std::cos(t); y = ry * std::sin(t);
    }
    poly.emplace_back(center.x() + x, center.y() + y);
  }
  return poly;
}

void append_cubic(Polygon& out, const Point& p0, const Point& p1, const Point& p2,
                  const Point& p3, double tolerance) {
  const double dd = std::max((p0 - 2 * p1 + p2).norm(), (p1 - 2 * p2 + p3).norm());
  int n = std::max(1, static_cast<int>(std::ceil(std::sqrt(0.75 * dd / tolerance))));
  n = std::min(n, 4096);
  for (int i = 1; i <= n; ++i) {
    const double t = static_cast<double>(i) / n, u = 1 - t;
    out.push_back(u * u * u * p0 + 3 * u * u * t * p1 + 3 * u * t * t * p2 + t * t * t * p3);
  }
}

void append_quad(Polygon& out, const Point& p0, const Point& p1, const Point& p2,
                 double tolerance) {
  const double dd = (p0 - 2 * p1 + p2).norm();
  int n = std::max(1, static_cast<int>(std::ceil(std::sqrt(0.25 * dd / tolerance))));
  n = std::min(n, 4096);
  for (int i = 1; i <= n; ++i) {
    const double t = static_cast<double>(i) / n, u = 1 - t;
    out.push_back(u * u * p0 + 2 * u * t * p1 + t * t * p2);
  }
}

// Endpoint-parameterized arc to center parameterization.
void append_svg_arc(Polygon& out, const Point& from, double rx, double ry, double angle_deg,
                    bool large, bool sweep, const Point& to, double tolerance) {
  if (from == to) return;
  rx = std::abs(rx);
  ry = std::abs(ry);
  if (rx == 0 || ry == 0) {
    out.push_back(to);
    return;
  }
  const double phi = angle_deg * std::numbers::pi / 180.0;
  const double c = std::cos(phi), s = std::sin(phi);
  const Point d = 0.5 * (from - to);
  const double x1 = c * d.x() + s * d.y();
  const double y1 = -s * d.x() + c * d.y();
  const double lambda = (x1 * x1) / (rx * rx) + (y1 * y1) / (ry * ry);
  if (lambda > 1) {
    rx *= std::sqrt(lambda);
    ry *= std::sqrt(lambda);
  }
  const double num = rx * rx * ry * ry - rx * rx * y1 * y1 - ry * ry * x1 * x1;
  const double den = rx * rx * y1 * y1 + ry * ry * x1 * x1;
  double coef = den > 0 ? std::sqrt(std::max(0.0, num / den)) : 0.0;
  if (large == sweep) coef = -coef;
  const double cxp = coef * rx * y1 / ry;
  const double cyp = -coef * ry * x1 / rx;
  const Point mid = 0.5 * (from + to);
  const Point center(c * cxp - s * cyp + mid.x(), s * cxp + c * cyp + mid.y());
  auto angle = [](double ux, double uy, double vx, double vy) {
    return std::atan2(ux * vy - uy * vx, ux * vx + uy * vy);
  };
  const double theta1 = angle(1, 0, (x1 - cxp) / rx, (y1 - cyp) / ry);
  double dtheta = angle((x1 - cxp) / rx, (y1 - cyp) / ry, (-x1 - cxp) / rx, (-y1 - cyp) / ry);
  if (!sweep && dtheta > 0) dtheta -= 2 * std::numbers::pi;
  if (sweep && dtheta < 0) dtheta += 2 * std::numbers::pi;
  append_arc(out, center, rx, ry, phi, theta1, dtheta, tolerance);
  out.back() = to;
}

std::vector<Point> parse_points(std::string_view text) {
  NumberScanner scan(text);
  std::vector<Point> pts;
  while (!scan.at_end()) {
    auto x = scan.number();
    auto y = scan.number();
    if (!x || !y) break;
    pts.emplace_back(*x, *y);
  }
  return pts;
}

const std::unordered_map<std::string_view, bool>& non_rendering_tags() {
  static const std::unordered_map<std::string_view, bool> tags{
      {"defs", true},     {"clipPath", true}, {"mask", true},           {"symbol", true},
      {"marker", true},   {"pattern", true},  {"linearGradient", true}, {"radialGradient", true},
      {"filter", true},   {"title", true},    {"desc", true},           {"metadata", true},
      {"style", true},    {"script", true},
  };
  return tags;
}

bool is_non_rendering(std::string_view tag) { return non_rendering_tags().count(tag) > 0; }

struct BuildContext {
  const Rect& viewbox;
  double tolerance;
  std::unordered_map<std::string, const xml::Node*> ids;
};

AffineTransform viewport_transform(const xml::Node& n, const Rect& viewbox) {
  AffineTransform t = AffineTransform::Identity();
  const double x = length_attr(n, "x", viewbox.width());
  const double y = length_attr(n, "y", viewbox.height());
  t.translate(Point(x, y));
  const auto* vb = n.attribute("viewBox");
  if (!vb) return t;
  NumberScanner scan(*vb);
  auto vx = scan.number(), vy = scan.number(), vw = scan.number(), vh = scan.number();
  if (!vx || !vy || !vw || !vh || *vw <= 0 || *vh <= 0) return t;
  const double w = length_attr(n, "width", viewbox.width(), *vw);
  const double h = length_attr(n, "height", viewbox.height(), *vh);
  const double scale = std::min(w / *vw, h / *vh);
  t.translate(Point((w - *vw * scale) / 2, (h - *vh * scale) / 2));
  t.scale(scale);
  t.translate(Point(-*vx, -*vy));
  return t;
}

std::vector<Polygon> shape_outline(const xml::Node& n, const BuildContext& ctx,
                                   double tolerance, int use_depth);

// Outline of a whole subtree, expressed in the coordinate system that the
// subtree root's transform attribute maps into.
void subtree_outline(const xml::Node& n, const AffineTransform& to_target,
                     const BuildContext& ctx, double root_scale, int use_depth,
                     std::vector<Polygon>& out) {
  if (!n.is_element() || is_non_rendering(n.name)) return;
  AffineTransform local = AffineTransform::Identity();
  if (const auto* t = n.attribute("transform")) local = parse_transform(*t);
  const AffineTransform m = to_target * local;
  const double scale = std::max(root_scale * max_scale(m), 1e-12);
  for (auto& poly : shape_outline(n, ctx, ctx.tolerance / scale, use_depth)) {
    for (auto& p : poly) p = m * p;
    out.push_back(std::move(poly));
  }
  if (n.name == "use") return;
  for (const auto& c : n.children) subtree_outline(c, m, ctx, root_scale, use_depth, out);
}

std::vector<Polygon> shape_outline(const xml::Node& n, const BuildContext& ctx,
                                   double tolerance, int use_depth) {
  const Rect& vb = ctx.viewbox;
  const double diag_base = vb.diagonal() / std::numbers::sqrt2;
  std::vector<Polygon> out;
  const std::string& tag = n.name;
  if (tag == "rect") {
    const double x = length_attr(n, "x", vb.width()), y = length_attr(n, "y", vb.height());
    const double w = length_attr(n, "width", vb.width()), h = length_attr(n, "height", vb.height());
    if (w <= 0 || h <= 0) return out;
    double rx = length_attr(n, "rx", vb.width(), -1), ry = length_attr(n, "ry", vb.height(), -1);
    if (rx < 0) rx = ry;
    if (ry < 0) ry = rx;
    rx = std::clamp(rx, 0.0, w / 2);
    ry = std::clamp(ry, 0.0, h / 2);
    Polygon poly;
    if (rx <= 0 || ry <= 0) {
      poly = {{x, y}, {x + w, y}, {x + w, y + h}, {x, y + h}};
    } else {
      const double q = std::numbers::pi / 2;
      poly.emplace_back(x + rx, y);
      poly.emplace_back(x + w - rx, y);
      append_arc(poly, {x + w - rx, y + ry}, rx, ry, 0, -q, q, tolerance);
      poly.emplace_back(x + w, y + h - ry);
      append_arc(poly, {x + w - rx, y + h - ry}, rx, ry, 0, 0, q, tolerance);
      poly.emplace_back(x + rx, y + h);
      append_arc(poly, {x + rx, y + h - ry}, rx, ry, 0, q, q, tolerance);
      poly.emplace_back(x, y + ry);
      append_arc(poly, {x + rx, y + ry}, rx, ry, 0, 2 * q, q, tolerance);
    }
    out.push_back(std::move(poly));
  } else if (tag == "circle") {
    const double r = length_attr(n, "r", diag_base);
    if (r <= 0) return out;
    out.push_back(ellipse_polygon({length_attr(n, "cx", vb.width()), length_attr(n, "cy", vb.height())},
                                  r, r, tolerance));
  } else if (tag == "ellipse") {
    const double rx = length_attr(n, "rx", vb.width()), ry = length_attr(n, "ry", vb.height());
    if (rx <= 0 || ry <= 0) return out;
    out.push_back(ellipse_polygon({length_attr(n, "cx", vb.width()), length_attr(n, "cy", vb.height())},
                                  rx, ry, tolerance));
  } else if (tag == "line") {
    out.push_back({{length_attr(n, "x1", vb.width()), length_attr(n, "y1", vb.height())},
                   {length_attr(n, "x2", vb.width()), length_attr(n, "y2", vb.height())}});
  } else if (tag == "polyline" || tag == "polygon") {
    if (const auto* pts = n.attribute("points")) {
      auto poly = parse_points(*pts);
      if (!poly.empty()) out.push_back(std::move(poly));
    }
  } else if (tag == "path") {
    if (const auto* d = n.attribute("d")) out = flatten_path(*d, tolerance);
  } else if (tag == "use" && use_depth < 16) {
    const auto* href = n.attribute("href");
    if (!href) href = n.attribute("xlink:href");
    if (href && !href->empty() && href->front() == '#') {
      auto it = ctx.ids.find(href->substr(1));
      if (it != ctx.ids.end()) {
        AffineTransform offset = AffineTransform::Identity();
        offset.translate(Point(length_attr(n, "x", vb.width()), length_attr(n, "y", vb.height())));
        const xml::Node& ref = *it->second;
        // Scale such that the referenced subtree is flattened at `tolerance`
        // in this element's local space.
        const double scale = ctx.tolerance / tolerance;
        if (ref.name == "symbol") {
          for (const auto& c : ref.children)
            subtree_outline(c, offset, ctx, scale, use_depth + 1, out);
        } else {
          subtree_outline(ref, offset, ctx, scale, use_depth + 1, out);
        }
      }
    }
  }
  return out;
}

void collect_ids(const xml::Node& n, std::unordered_map<std::string, const xml::Node*>& ids) {
  if (!n.is_element()) return;
  if (const auto* id = n.attribute("id")) ids.emplace(*id, &n);
  for (const auto& c : n.children) collect_ids(c, ids);
}

void build_elements(const xml::Node& n, const BuildContext& ctx,
                    const AffineTransform& parent_root, std::optional<ElementIndex> parent,
                    std::size_t depth, bool rendered, std::vector<ElementNode>& out) {
  if (!n.is_element()) return;
  ElementNode e;
  e.index = out.size();
  e.tag = n.name;
  e.attributes = n.attributes;
  e.parent = parent;
  e.depth = depth;
  e.source_begin = n.begin;
  e.source_start_tag_end = n.start_tag_end;
  e.source_end = n.end;
  if (const auto* cls = n.attribute("class")) {
    std::istringstream ss(*cls);
    std::string c;
    while (ss >> c)
      if (!e.has_class(c)) e.classes.push_back(c);
  }
  for (const auto& a : n.attributes)
    if (a.name.size() > 5 && a.name.compare(0, 5, "data-") == 0)
      e.data_attributes.emplace(a.name.substr(5), a.value);

  const bool is_root = !parent.has_value();
  if (!is_root) {
    if (n.name == "svg") e.local_transform = viewport_transform(n, ctx.viewbox);
    if (const auto* t = n.attribute("transform"))
      e.local_transform = e.local_transform * parse_transform(*t);
  }
  e.root_transform = parent_root * e.local_transform;
  e.rendered = rendered && !is_non_rendering(n.name);
  if (e.rendered) {
    const double scale = std::max(max_scale(e.root_transform), 1e-12);
    e.geometry_outline = shape_outline(n, ctx, ctx.tolerance / scale, 0);
    for (const auto& poly : e.geometry_outline)
      for (const auto& p : poly) e.own_bounds.expand(e.root_transform * p);
  }
  const ElementIndex self = e.index;
  const AffineTransform root_t = e.root_transform;
  const bool child_rendered = e.rendered;
  out.push_back(std::move(e));
  for (const auto& c : n.children)
    build_elements(c, ctx, root_t, self, depth + 1, child_rendered, out);
  out[self].subtree_end = out.size();
}

std::map<std::string, std::string> parse_style(std::string_view style) {
  std::map<std::string, std::string> out;
  std::size_t pos = 0;
  while (pos < style.size()) {
    std::size_t semi = pos;
    while (semi < style.size() && style[semi] != ';') ++semi;
    auto decl = style.substr(pos, semi - pos);
    std::size_t colon = 0;
    while (colon < decl.size() && decl[colon] != ':') ++colon;
    if (colon < decl.size()) {
      auto k = trim(decl.substr(0, colon));
      auto v = trim(decl.substr(colon + 1));
      if (!k.empty()) out[std::string(k)] = std::string(v);
    }
    pos = semi + 1;
  }
  return out;
}

}  // namespace

std::optional<double> parse_number(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  std::size_t start = text.front() == '+' ? 1 : 0;
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data() + start, text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v))
    return std::nullopt;
  return v;
}

AffineTransform parse_transform(std::string_view text) {
  AffineTransform t = AffineTransform::Identity();
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() &&
           (std::isspace(static_cast<unsigned char>(text[pos])) || text[pos] == ','))
      ++pos;
    if (pos >= text.size()) break;
    auto open = text.find('(', pos);
    auto close = text.find(')', pos);
    if (open == std::string_view::npos || close == std::string_view::npos || close < open) break;
    auto name = trim(text.substr(pos, open - pos));
    NumberScanner scan(text.substr(open + 1, close - open - 1));
    std::vector<double> args;
    while (!scan.at_end()) {
      auto v = scan.number();
      if (!v) break;
      args.push_back(*v);
    }
    pos = close + 1;
    auto arg = [&](std::size_t i, double fallback) { return i < args.size() ? args[i] : fallback; };
    AffineTransform step = AffineTransform::Identity();
    if (name == "matrix" && args.size() == 6) {
      step.matrix() << args[0], args[2], args[4], args[1], args[3], args[5], 0, 0, 1;
    } else if (name == "translate" && !args.empty()) {
      step.translate(Point(args[0], arg(1, 0.0)));
    } else if (name == "scale" && !args.empty()) {
      step.scale(Point(args[0], arg(1, args[0])));
    } else if (name == "rotate" && !args.empty()) {
      const Point c(arg(1, 0.0), arg(2, 0.0));
      step.translate(c);
      step.rotate(args[0] * std::numbers::pi / 180.0);
      step.translate(-c);
    } else if (name == "skewX" && !args.empty()) {
      step.matrix()(0, 1) = std::tan(args[0] * std::numbers::pi / 180.0);
    } else if (name == "skewY" && !args.empty()) {
      step.matrix()(1, 0) = std::tan(args[0] * std::numbers::pi / 180.0);
    } else {
      continue;
    }
    t = t * step;
  }
  return t;
}

std::string format_number(double v) {
  if (v == 0) return "0";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string format_transform(const AffineTransform& t) {
  const auto& m = t.matrix();
  return "matrix(" + format_number(m(0, 0)) + ' ' + format_number(m(1, 0)) + ' ' +
         format_number(m(0, 1)) + ' ' + format_number(m(1, 1)) + ' ' + format_number(m(0, 2)) + ' ' +
         format_number(m(1, 2)) + ')';
}

std::vector<Polygon> flatten_path(std::string_view path_data, double tolerance) {
  std::vector<Polygon> out;
  Polygon current;
  Point cursor(0, 0), start(0, 0), last_ctrl(0, 0);
  char last_cmd = 0;
  NumberScanner scan(path_data);
  auto flush = [&] {
    if (!current.empty()) out.push_back(std::move(current));
    current.clear();
  };
  char cmd = 0;
  while (!scan.at_end()) {
    if (std::isalpha(static_cast<unsigned char>(scan.peek()))) {
      cmd = scan.peek();
      scan.advance();
    } else if (cmd == 0) {
      break;  // numbers before any command
    } else if (cmd == 'M') {
      cmd = 'L';
    } else if (cmd == 'm') {
      cmd = 'l';
    }
    const bool rel = std::islower(static_cast<unsigned char>(cmd));
    const Point base = rel ? cursor : Point(0, 0);
    auto pt = [&]() -> std::optional<Point> {
      auto x = scan.number();
      auto y = scan.number();
      if (!x || !y) return std::nullopt;
      return base + Point(*x, *y);
    };
    const char upper = static_cast<char>(std::toupper(static_cast<unsigned char>(cmd)));
    if (upper == 'Z') {
      if (!current.empty()) current.push_back(start);
      cursor = start;
      flush();
      last_cmd = 'Z';
      if (scan.at_number()) break;
      continue;
    }
    if (!scan.at_number()) break;
    if (current.empty() && upper != 'M') current.push_back(cursor);
    switch (upper) {
      case 'M': {
        auto p = pt();
        if (!p) { flush(); return out; }
        flush();
        cursor = start = *p;
        current.push_back(cursor);
        break;
      }
      case 'L': {
        auto p = pt();
        if (!p) { flush(); return out; }
        cursor = *p;
        current.push_back(cursor);
        break;
      }
      case 'H': {
        auto x = scan.number();
        if (!x) { flush(); return out; }
        cursor = Point(rel ? cursor.x() + *x : *x, cursor.y());
        current.push_back(cursor);
        break;
      }
      case 'V': {
        auto y = scan.number();
        if (!y) { flush(); return out; }
        cursor = Point(cursor.x(), rel ? cursor.y() + *y : *y);
        current.push_back(cursor);
        break;
      }
      case 'C': {
        auto p1 = pt(), p2 = pt(), p3 = pt();
        if (!p1 || !p2 || !p3) { flush(); return out; }
        append_cubic(current, cursor, *p1, *p2, *p3, tolerance);
        last_ctrl = *p2;
        cursor = *p3;
        break;
      }
      case 'S': {
        const bool smooth = last_cmd == 'C' || last_cmd == 'S';
        const Point p1 = smooth ? Point(2 * cursor - last_ctrl) : cursor;
        auto p2 = pt(), p3 = pt();
        if (!p2 || !p3) { flush(); return out; }
        append_cubic(current, cursor, p1, *p2, *p3, tolerance);
        last_ctrl = *p2;
        cursor = *p3;
        break;
      }
      case 'Q': {
        auto p1 = pt(), p2 = pt();
        if (!p1 || !p2) { flush(); return out; }
        append_quad(current, cursor, *p1, *p2, tolerance);
        last_ctrl = *p1;
        cursor = *p2;
        break;
      }
      case 'T': {
        const bool smooth = last_cmd == 'Q' || last_cmd == 'T';
        const Point p1 = smooth ? Point(2 * cursor - last_ctrl) : cursor;
        auto p2 = pt();
        if (!p2) { flush(); return out; }
        append_quad(current, cursor, p1, *p2, tolerance);
        last_ctrl = p1;
        cursor = *p2;
        break;
      }
      case 'A': {
        auto rx = scan.number(), ry = scan.number(), rot = scan.number();
        auto large = scan.flag(), sweep = scan.flag();
        auto p = pt();
        if (!rx || !ry || !rot || !large || !sweep || !p) { flush(); return out; }
        append_svg_arc(current, cursor, *rx, *ry, *rot, *large, *sweep, *p, tolerance);
        cursor = *p;
        break;
      }
      default:
        flush();
        return out;
    }
    last_cmd = upper;
  }
  flush();
  return out;
}

VectorDocument parse_document(std::string svg_text, std::string styles,
                              const ParseOptions& options) {
  auto tree = std::make_shared<xml::Document>(xml::parse(svg_text));
  const xml::Node& root = tree->root;
  if (root.name != "svg")
    throw Error(ErrorCode::MalformedSvg, "root element is <" + root.name + ">, expected <svg>",
                "1:1");

  VectorDocument doc;
  doc.flattening_tolerance = options.flattening_tolerance;
  bool have_viewbox = false;
  if (const auto* vb = root.attribute("viewBox")) {
    NumberScanner scan(*vb);
    auto x = scan.number(), y = scan.number(), w = scan.number(), h = scan.number();
    if (x && y && w && h && *w > 0 && *h > 0) {
      doc.viewbox = Rect::from_xywh(*x, *y, *w, *h);
      have_viewbox = true;
    }
  }
  if (!have_viewbox) {
    const auto* w = root.attribute("width");
    const auto* h = root.attribute("height");
    std::optional<double> wv, hv;
    if (w && w->find('%') == std::string::npos) wv = parse_length(*w, 0);
    if (h && h->find('%') == std::string::npos) hv = parse_length(*h, 0);
    if (!wv || !hv || *wv <= 0 || *hv <= 0)
      throw Error(ErrorCode::MissingViewBox,
                  "root <svg> has no viewBox and no usable width/height");
    doc.viewbox = Rect::from_xywh(0, 0, *wv, *hv);
  }

  BuildContext ctx{doc.viewbox, options.flattening_tolerance, {}};
  collect_ids(root, ctx.ids);
  build_elements(root, ctx, AffineTransform::Identity(), std::nullopt, 0, true, doc.elements);

  doc.source_digest = sha256_hex(tree->source);
  doc.source = tree->source;
  doc.styles = std::move(styles);
  doc.tree = std::move(tree);
  return doc;
}

std::vector<ElementIndex> select_group(const VectorDocument& doc, std::string_view selector) {
  std::string_view cls = selector;
  if (!cls.empty() && cls.front() == '.') cls.remove_prefix(1);
  std::vector<ElementIndex> out;
  if (cls.empty()) return out;
  for (const auto& e : doc.elements)
    if (e.has_class(cls)) out.push_back(e.index);
  return out;
}

Rect bounding_box(const VectorDocument& doc, ElementIndex element) {
  const ElementNode& e = doc.element(element);
  Rect box;
  if (e.rendered) {
    for (ElementIndex i = element; i < e.subtree_end; ++i) {
      const auto& d = doc.elements[i];
      if (d.rendered) box.expand(d.own_bounds);
    }
  }
  if (box.empty())
    throw Error(ErrorCode::DegenerateGeometry,
                "element " + std::to_string(element) + " <" + e.tag + "> has no renderable outline");
  return box;
}

Point midpoint(const VectorDocument& doc, ElementIndex element) {
  return bounding_box(doc, element).center();
}

double data_value(const VectorDocument& doc, ElementIndex element,
                  const std::optional<std::string>& attribute) {
  const ElementNode& e = doc.element(element);
  if (attribute && !attribute->empty()) {
    std::string key = *attribute;
    if (key.rfind("data-", 0) == 0) key = key.substr(5);
    auto it = e.data_attributes.find(key);
    if (it != e.data_attributes.end()) {
      auto v = parse_number(it->second);
      if (!v)
        throw Error(ErrorCode::NonNumericAttribute,
                    "data-" + key + "=\"" + it->second + "\" is not a number", key);
      return *v;
    }
  }
  return bounding_box(doc, element).diagonal();
}

std::optional<std::string> presentation_value(const VectorDocument& doc, ElementIndex element,
                                              std::string_view property) {
  static const std::vector<std::string_view> inherited{"fill", "stroke", "stroke-width",
                                                       "fill-opacity", "stroke-opacity"};
  const bool inheritable =
      std::find(inherited.begin(), inherited.end(), property) != inherited.end();
  std::optional<ElementIndex> cur = element;
  while (cur) {
    const ElementNode& e = doc.element(*cur);
    if (const auto* style = e.attribute("style")) {
      auto decls = parse_style(*style);
      auto it = decls.find(std::string(property));
      if (it != decls.end() && it->second != "inherit") return it->second;
    }
    if (const auto* v = e.attribute(property); v && *v != "inherit") return *v;
    if (!inheritable) break;
    cur = e.parent;
  }
  return std::nullopt;
}

}  // namespace sway
