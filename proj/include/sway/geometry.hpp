#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "sway/error.hpp"

namespace sway {

template <typename Scalar>
using Point2 = Eigen::Matrix<Scalar, 2, 1>;

using Point = Point2<double>;
using Polygon = std::vector<Point>;
using AffineTransform = Eigen::Transform<double, 2, Eigen::Affine>;

/// Axis-aligned box in user units. An empty box has min > max.
struct Rect {
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  double max_x = -std::numeric_limits<double>::infinity();
  double max_y = -std::numeric_limits<double>::infinity();

  static Rect from_xywh(double x, double y, double w, double h) {
    return {x, y, x + w, y + h};
  }

  bool empty() const { return !(max_x >= min_x && max_y >= min_y); }
  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
  double diagonal() const { return std::hypot(width(), height()); }
  Point center() const { return {0.5 * (min_x + max_x), 0.5 * (min_y + max_y)}; }

  void expand(const Point& p) {
    min_x = std::min(min_x, p.x());
    min_y = std::min(min_y, p.y());
    max_x = std::max(max_x, p.x());
    max_y = std::max(max_y, p.y());
  }
  void expand(const Rect& r) {
    if (r.empty()) return;
    min_x = std::min(min_x, r.min_x);
    min_y = std::min(min_y, r.min_y);
    max_x = std::max(max_x, r.max_x);
    max_y = std::max(max_y, r.max_y);
  }
  bool contains(const Point& p, double slack = 0.0) const {
    return p.x() >= min_x - slack && p.x() <= max_x + slack && p.y() >= min_y - slack &&
           p.y() <= max_y + slack;
  }

  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Largest stretch factor of the linear part (operator 2-norm).
inline double max_scale(const AffineTransform& t) {
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(t.linear());
  return svd.singularValues()(0);
}

// Scalar projection of p onto start->end, clamped to [0,1].
template <typename Scalar>
Scalar project_on_line(const Point2<Scalar>& p, const Point2<Scalar>& start,
                       const Point2<Scalar>& end) {
  const Point2<Scalar> dir = end - start;
  const Scalar len2 = dir.squaredNorm();
  if (!(len2 > Scalar(0)))
    throw Error(ErrorCode::DegenerateLine, "projection line has coincident endpoints");
  const Scalar s = (p - start).dot(dir) / len2;
  return std::clamp(s, Scalar(0), Scalar(1));
}

template <typename Scalar>
Scalar radial_score(const Point2<Scalar>& p, const Point2<Scalar>& center) {
  return (p - center).norm();
}

template <typename Scalar>
Scalar polyline_length(const std::vector<Point2<Scalar>>& polyline) {
  Scalar total(0);
  for (std::size_t i = 1; i < polyline.size(); ++i)
    total += (polyline[i] - polyline[i - 1]).norm();
  return total;
}

/// Arclength fraction of the point on `polyline` closest to `p`.
/// Equidistant candidates resolve to the one with the smallest arclength.
template <typename Scalar>
Scalar sketch_progress(const Point2<Scalar>& p, const std::vector<Point2<Scalar>>& polyline) {
  const Scalar total = polyline_length(polyline);
  if (polyline.size() < 2 || !(total > Scalar(0)))
    throw Error(ErrorCode::DegeneratePath, "sketch path has zero length");

  Scalar best_d2 = std::numeric_limits<Scalar>::infinity();
  Scalar best_arc(0);
  Scalar walked(0);
  for (std::size_t i = 1; i < polyline.size(); ++i) {
    const Point2<Scalar>& a = polyline[i - 1];
    const Point2<Scalar> seg = polyline[i] - a;
    const Scalar len2 = seg.squaredNorm();
    const Scalar len = std::sqrt(len2);
    if (len2 > Scalar(0)) {
      const Scalar t = std::clamp((p - a).dot(seg) / len2, Scalar(0), Scalar(1));
      const Scalar d2 = (a + t * seg - p).squaredNorm();
      if (d2 < best_d2) {
        best_d2 = d2;
        best_arc = walked + t * len;
      }
    }
    walked += len;
  }
  return std::clamp(best_arc / total, Scalar(0), Scalar(1));
}

}  // namespace sway
