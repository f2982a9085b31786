#pragma once

// Independent reference computations used only by tests. Nothing here calls
// into the engine's geometry code.

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Core>

namespace sway::oracle {

using Vec = Eigen::Vector2d;

/// Progress of the nearest of `samples`+1 points spaced uniformly in
/// arclength along the polyline.
inline double sampled_sketch_progress(const Vec& p, const std::vector<Vec>& path, int samples) {
  std::vector<double> cum{0.0};
  for (std::size_t i = 1; i < path.size(); ++i) cum.push_back(cum.back() + (path[i] - path[i - 1]).norm());
  const double total = cum.back();
  double best = std::numeric_limits<double>::infinity(), best_s = 0;
  std::size_t seg = 1;
  for (int k = 0; k <= samples; ++k) {
    const double s = total * k / samples;
    while (seg + 1 < path.size() && cum[seg] < s) ++seg;
    const double len = cum[seg] - cum[seg - 1];
    const double t = len > 0 ? (s - cum[seg - 1]) / len : 0.0;
    const Vec q = path[seg - 1] + t * (path[seg] - path[seg - 1]);
    const double d = (q - p).squaredNorm();
    if (d < best) {
      best = d;
      best_s = s;
    }
  }
  return best_s / total;
}

/// Clamped scalar projection written out component-wise.
inline double clamped_projection(const Vec& p, const Vec& a, const Vec& b) {
  const double dx = b.x() - a.x(), dy = b.y() - a.y();
  double s = ((p.x() - a.x()) * dx + (p.y() - a.y()) * dy) / (dx * dx + dy * dy);
  return s < 0 ? 0 : s > 1 ? 1 : s;
}

}  // namespace sway::oracle
