#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sway/geometry.hpp"
#include "sway/svg_model.hpp"

namespace sway {

enum class Direction { Ascending, Descending };
enum class DataBasis { Rank, Value };

// Spatial parameters below are viewBox-relative: (0,0) is the viewBox's
// top-left corner and (1,1) its bottom-right.

struct DataCentric {
  Direction direction = Direction::Ascending;
  DataBasis basis = DataBasis::Value;
  std::optional<std::string> attribute;
  friend bool operator==(const DataCentric&, const DataCentric&) = default;
};

struct LayoutRadius {
  Point center{0.5, 0.5};
  friend bool operator==(const LayoutRadius& a, const LayoutRadius& b) { return a.center == b.center; }
};

struct LayoutProjection {
  Point start{0, 0};
  Point end{1, 0};
  friend bool operator==(const LayoutProjection& a, const LayoutProjection& b) {
    return a.start == b.start && a.end == b.end;
  }
};

struct LayoutSketch {
  std::vector<Point> polyline;
  friend bool operator==(const LayoutSketch& a, const LayoutSketch& b) {
    return a.polyline == b.polyline;
  }
};

struct LayerCentric {
  Direction direction = Direction::Ascending;
  friend bool operator==(const LayerCentric&, const LayerCentric&) = default;
};

struct RandomOrder {
  std::uint64_t seed = 0;
  friend bool operator==(const RandomOrder&, const RandomOrder&) = default;
};

using CoordinationScheme =
    std::variant<DataCentric, LayoutRadius, LayoutProjection, LayoutSketch, LayerCentric, RandomOrder>;

/// Largest seed that survives a round trip through an IEEE double, which is
/// what the exported script's JSON parser produces.
inline constexpr std::uint64_t kMaxSeed = (std::uint64_t{1} << 53) - 1;

/// Throws Error(InvalidScheme) naming the violated invariant.
void validate_scheme(const CoordinationScheme& scheme);

std::string mode_name(const CoordinationScheme& scheme);

nlohmann::json scheme_to_json(const CoordinationScheme& scheme);
/// Throws Error(SchemaViolation) with a JSON path rooted at `path`.
CoordinationScheme scheme_from_json(const nlohmann::json& j, const std::string& path = "$");

Point to_user(const Rect& viewbox, const Point& relative);
Point to_relative(const Rect& viewbox, const Point& user);

/// Per-element weights for one group, in document order.
struct WeightAssignment {
  std::string group;
  CoordinationScheme scheme;
  std::vector<ElementIndex> elements;
  std::vector<double> weights;

  std::size_t size() const { return elements.size(); }
  std::optional<double> weight_of(ElementIndex element) const;
  double max_weight() const;
};

/// Min-max normalization; constant or singleton input maps to all zeros, as
/// does input whose spread is within 1e-12 of its magnitude.
std::vector<double> normalize(std::span<const double> raw);

/// Uniform [0,1) draw keyed by (seed, element index).
double random_weight(std::uint64_t seed, ElementIndex element);

WeightAssignment assign_weights(const VectorDocument& doc, const std::string& group,
                                const CoordinationScheme& scheme);

/// Start time in ms of an element with weight w: delay + w * offset.
constexpr double element_start_time(double delay_ms, double offset_ms, double weight) {
  return delay_ms + weight * offset_ms;
}

}  // namespace sway
