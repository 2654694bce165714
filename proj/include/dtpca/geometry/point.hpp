#pragma once

#include <compare>

namespace dtpca::geometry {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
  friend auto operator<=>(const Point&, const Point&) = default;
};

}  // namespace dtpca::geometry
