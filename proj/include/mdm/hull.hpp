#pragma once

#include <vector>

#include "mdm/geometry.hpp"

namespace mdm {

/// Counterclockwise convex hull (monotone chain). Points within `tol` of the
/// line through their hull neighbours are dropped, as are duplicates. A single
/// point or a collinear set yields 1 or 2 vertices.
std::vector<Point2> convex_hull(std::vector<Point2> points, double tol = 0.0);

}  // namespace mdm
