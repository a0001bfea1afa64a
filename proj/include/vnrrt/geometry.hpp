#pragma once

#include <cmath>

namespace vnrrt {

/// A point in the continuous map frame. Pixel (i, j) spans [i, i+1) x [j, j+1).
struct ContinuousPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const ContinuousPoint&, const ContinuousPoint&) = default;
};

inline double distance(ContinuousPoint a, ContinuousPoint b) {
  return std::hypot(b.x - a.x, b.y - a.y);
}

inline double squared_distance(ContinuousPoint a, ContinuousPoint b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  return dx * dx + dy * dy;
}

}  // namespace vnrrt
