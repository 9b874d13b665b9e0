#include "mdm/hull.hpp"

#include <algorithm>

namespace mdm {

namespace {

// Signed distance of c from the line (a, b), positive to the left.
double side(Point2 a, Point2 b, Point2 c) {
  const double len = distance(a, b);
  const double cr = cross(b - a, c - a);
  return len > 0.0 ? cr / len : (c == a ? 0.0 : -1.0);
}

}  // namespace

std::vector<Point2> convex_hull(std::vector<Point2> points, double tol) {
  std::sort(points.begin(), points.end(), [](Point2 a, Point2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  points.erase(std::unique(points.begin(), points.end(),
                           [tol](Point2 a, Point2 b) { return distance(a, b) <= tol; }),
               points.end());
  if (points.size() <= 2) return points;
  std::vector<Point2> hull(2 * points.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    while (k >= 2 && side(hull[k - 2], hull[k - 1], points[i]) <= tol) --k;
    hull[k++] = points[i];
  }
  for (std::size_t i = points.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && side(hull[k - 2], hull[k - 1], points[i]) <= tol) --k;
    hull[k++] = points[i];
  }
  hull.resize(k - 1);
  if (hull.size() == 2 && distance(hull[0], hull[1]) <= tol) hull.resize(1);
  return hull;
}

}  // namespace mdm
