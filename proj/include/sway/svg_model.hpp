#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sway/geometry.hpp"
#include "sway/xml.hpp"

namespace sway {

inline constexpr double kDefaultFlatteningTolerance = 0.1;

using ElementIndex = std::size_t;

struct ParseOptions {
  double flattening_tolerance = kDefaultFlatteningTolerance;  // user units, root space
};

struct ElementNode {
  ElementIndex index = 0;
  std::string tag;
  std::vector<std::string> classes;  // in attribute order, deduplicated
  std::map<std::string, std::string> data_attributes;  // "data-" prefix stripped
  std::vector<xml::Attribute> attributes;
  AffineTransform local_transform = AffineTransform::Identity();
  AffineTransform root_transform = AffineTransform::Identity();  // local -> root user space
  std::vector<Polygon> geometry_outline;  // local space

  std::optional<ElementIndex> parent;
  ElementIndex subtree_end = 0;  // descendants occupy (index, subtree_end)
  std::size_t depth = 0;
  bool rendered = true;  // false inside defs, clipPath, symbol, ...

  // Byte span in VectorDocument::source.
  std::size_t source_begin = 0;
  std::size_t source_start_tag_end = 0;
  std::size_t source_end = 0;

  Rect own_bounds;  // root-space box of geometry_outline alone

  bool has_class(std::string_view name) const;
  const std::string* attribute(std::string_view name) const;
};

/// Immutable parsed document. Elements are in document (rendering) order and
/// element i has index i.
struct VectorDocument {
  Rect viewbox;
  std::vector<ElementNode> elements;
  std::string styles;
  std::string source_digest;  // sha-256 of source, hex
  std::string source;
  std::shared_ptr<const xml::Document> tree;
  double flattening_tolerance = kDefaultFlatteningTolerance;

  const ElementNode& element(ElementIndex i) const;
};

VectorDocument parse_document(std::string svg_text, std::string styles = {},
                              const ParseOptions& options = {});

std::vector<ElementIndex> select_group(const VectorDocument& doc, std::string_view selector);

Rect bounding_box(const VectorDocument& doc, ElementIndex element);
Point midpoint(const VectorDocument& doc, ElementIndex element);

/// Numeric `data-<attribute>` value, or the bounding-box diagonal when the
/// attribute is absent or not requested.
double data_value(const VectorDocument& doc, ElementIndex element,
                  const std::optional<std::string>& attribute = std::nullopt);

/// Presentation property lookup: inline style wins over the attribute, and
/// inheritable properties fall back to ancestors.
std::optional<std::string> presentation_value(const VectorDocument& doc, ElementIndex element,
                                              std::string_view property);

// Parsing helpers shared with the renderer and tests.
AffineTransform parse_transform(std::string_view text);
/// Shortest text that reads back to the same double; "-0" prints as "0".
std::string format_number(double v);
std::string format_transform(const AffineTransform& t);
std::vector<Polygon> flatten_path(std::string_view path_data, double tolerance);
std::optional<double> parse_number(std::string_view text);

}  // namespace sway
