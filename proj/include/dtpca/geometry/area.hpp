#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "dtpca/error.hpp"
#include "dtpca/geometry/point.hpp"

namespace dtpca::geometry {

inline double edge_length(Point p, Point q) {
  return std::sqrt((p.x - q.x) * (p.x - q.x) + (p.y - q.y) * (p.y - q.y));
}

/// Heron's formula. The radicand S(S-l1)(S-l2)(S-l3) is evaluated in the
/// cancellation-free ordering (l1 >= l2 >= l3), clamped to 0 when it is only
/// slightly negative, and rejected below -1e-9 * S^4.
inline double triangle_area(double l1, double l2, double l3) {
  if (!(l1 >= 0.0 && l2 >= 0.0 && l3 >= 0.0)) {
    fail(ErrorCategory::data, "triangle_area: edge lengths must be non-negative");
  }
  double a = l1, b = l2, c = l3;
  if (a < b) std::swap(a, b);
  if (b < c) std::swap(b, c);
  if (a < b) std::swap(a, b);

  const double s = (l1 + l2 + l3) / 2.0;
  // 16 * S(S-a)(S-b)(S-c) regrouped so no large terms cancel
  const double radicand16 = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
  const double radicand = radicand16 / 16.0;
  if (radicand < 0.0) {
    if (radicand < -1e-9 * s * s * s * s) {
      fail(ErrorCategory::data, "triangle_area: edge lengths violate the triangle inequality");
    }
    return 0.0;
  }
  return std::sqrt(radicand);
}

inline std::vector<double> relative_areas(std::span<const double> areas) {
  if (areas.empty()) fail(ErrorCategory::data, "relative_areas: no areas");
  for (double a : areas) {
    if (!(a >= 0.0)) fail(ErrorCategory::data, "relative_areas: negative area");
  }
  const double largest = *std::max_element(areas.begin(), areas.end());
  if (largest <= 0.0) fail(ErrorCategory::data, "relative_areas: all areas are zero");
  std::vector<double> out;
  out.reserve(areas.size());
  for (double a : areas) out.push_back(a / largest);
  return out;
}

/// Mean over all triangles of the relative areas.
inline double average_relative_area(std::span<const double> relative) {
  if (relative.empty()) fail(ErrorCategory::data, "average_relative_area: no relative areas");
  double sum = 0.0;
  for (double r : relative) sum += r;
  return sum / static_cast<double>(relative.size());
}

}  // namespace dtpca::geometry
