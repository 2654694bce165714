#pragma once

// Orientation and in-circle predicates. Determinants are evaluated in long
// double and classified as zero when |det| <= kRelativeTolerance * permanent,
// where the permanent is the same expansion with every product made absolute.

#include <cmath>

#include "dtpca/error.hpp"
#include "dtpca/geometry/point.hpp"

namespace dtpca::geometry {

inline constexpr long double kRelativeTolerance = 1e-12L;

enum class Orientation { clockwise = -1, collinear = 0, counterclockwise = 1 };
enum class CircleSide { inside, on, outside };

namespace detail {

inline int filtered_sign(long double det, long double permanent) {
  if (std::fabs(det) <= kRelativeTolerance * permanent) return 0;
  return det > 0 ? 1 : -1;
}

}  // namespace detail

/// Signed twice-area of triangle abc (positive when counterclockwise).
inline double signed_area2(Point a, Point b, Point c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

inline Orientation orientation(Point a, Point b, Point c) {
  const long double abx = (long double)b.x - a.x, aby = (long double)b.y - a.y;
  const long double acx = (long double)c.x - a.x, acy = (long double)c.y - a.y;
  const long double l = abx * acy, r = aby * acx;
  return static_cast<Orientation>(detail::filtered_sign(l - r, std::fabs(l) + std::fabs(r)));
}

inline bool collinear(Point a, Point b, Point c) {
  return orientation(a, b, c) == Orientation::collinear;
}

/// Classifies p against the circumcircle of abc, whatever the winding of abc.
inline CircleSide in_circumcircle(Point a, Point b, Point c, Point p) {
  const Orientation o = orientation(a, b, c);
  if (o == Orientation::collinear) {
    fail(ErrorCategory::data, "in_circumcircle: triangle vertices are collinear");
  }
  using ld = long double;
  const ld adx = (ld)a.x - p.x, ady = (ld)a.y - p.y;
  const ld bdx = (ld)b.x - p.x, bdy = (ld)b.y - p.y;
  const ld cdx = (ld)c.x - p.x, cdy = (ld)c.y - p.y;

  const ld bc1 = bdx * cdy, bc2 = cdx * bdy;
  const ld ca1 = cdx * ady, ca2 = adx * cdy;
  const ld ab1 = adx * bdy, ab2 = bdx * ady;
  const ld alift = adx * adx + ady * ady;
  const ld blift = bdx * bdx + bdy * bdy;
  const ld clift = cdx * cdx + cdy * cdy;

  const ld det = alift * (bc1 - bc2) + blift * (ca1 - ca2) + clift * (ab1 - ab2);
  const ld permanent = alift * (std::fabs(bc1) + std::fabs(bc2)) +
                       blift * (std::fabs(ca1) + std::fabs(ca2)) +
                       clift * (std::fabs(ab1) + std::fabs(ab2));

  int s = detail::filtered_sign(det, permanent);
  if (o == Orientation::clockwise) s = -s;
  if (s == 0) return CircleSide::on;
  return s > 0 ? CircleSide::inside : CircleSide::outside;
}

}  // namespace dtpca::geometry
