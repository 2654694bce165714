#pragma once

// Delaunay triangulation of a planar landmark set.
//
// Incremental Bowyer-Watson over a mesh closed by an infinite vertex: every
// convex-hull edge carries a "ghost" face, so no bounding super-triangle is
// needed and the result always covers exactly the convex hull. After all
// insertions, cocircular quadrilaterals are flipped so that the diagonal
// holding the smallest vertex index wins, which makes the output a pure
// function of the input.

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "dtpca/error.hpp"
#include "dtpca/geometry/area.hpp"
#include "dtpca/geometry/point.hpp"
#include "dtpca/geometry/predicates.hpp"
#include "dtpca/landmarks.hpp"

namespace dtpca::geometry {

/// Three vertex indices into the triangulated point set, ascending.
struct Triangle {
  std::array<std::size_t, 3> v{};

  friend bool operator==(const Triangle&, const Triangle&) = default;
  friend auto operator<=>(const Triangle&, const Triangle&) = default;
};

struct Triangulation {
  std::vector<Point> points;
  std::vector<Triangle> triangles;  // canonical order
  std::vector<double> areas;        // Heron area per triangle, pixel^2
  std::vector<double> relative_areas;
  double average_relative_area = 0.0;
};

namespace detail {

class BowyerWatson {
 public:
  explicit BowyerWatson(std::span<const Point> points) : pts_(points) {}

  std::vector<std::array<std::size_t, 3>> run() {
    const std::size_t n = pts_.size();
    std::size_t third = 2;
    while (third < n && collinear(pts_[0], pts_[1], pts_[third])) ++third;
    if (third == n) fail(ErrorCategory::data, "delaunay: all points are collinear");

    int a = 0, b = 1, c = static_cast<int>(third);
    if (orientation(pts_[0], pts_[1], pts_[third]) == Orientation::clockwise) std::swap(b, c);
    std::vector<int> initial{new_face({a, b, c}), new_face({b, a, kInfinite}),
                             new_face({c, b, kInfinite}), new_face({a, c, kInfinite})};
    link(initial);

    for (std::size_t i = 2; i < n; ++i) {
      if (i != third) insert(static_cast<int>(i));
    }

    std::vector<std::array<std::size_t, 3>> out;
    for (const Face& f : faces_) {
      if (f.alive && !is_ghost(f)) {
        out.push_back({static_cast<std::size_t>(f.v[0]), static_cast<std::size_t>(f.v[1]),
                       static_cast<std::size_t>(f.v[2])});
      }
    }
    return out;
  }

 private:
  static constexpr int kInfinite = -1;

  // Edge i is (v[i+1], v[i+2]) and is shared with nb[i]. Real faces are counterclockwise.
  struct Face {
    std::array<int, 3> v{};
    std::array<int, 3> nb{-1, -1, -1};
    bool alive = true;
  };

  static bool is_ghost(const Face& f) {
    return f.v[0] == kInfinite || f.v[1] == kInfinite || f.v[2] == kInfinite;
  }

  int new_face(std::array<int, 3> v) {
    Face f;
    f.v = v;
    if (!free_.empty()) {
      const int id = free_.back();
      free_.pop_back();
      faces_[id] = f;
      return id;
    }
    faces_.push_back(f);
    return static_cast<int>(faces_.size()) - 1;
  }

  // Pairs up faces in `ids` that share an edge with opposite directions.
  void link(const std::vector<int>& ids) {
    std::map<std::pair<int, int>, std::pair<int, int>> open;
    for (int id : ids) {
      for (int i = 0; i < 3; ++i) {
        const Face& f = faces_[id];
        const std::pair<int, int> edge{f.v[(i + 1) % 3], f.v[(i + 2) % 3]};
        auto twin = open.find({edge.second, edge.first});
        if (twin != open.end()) {
          faces_[id].nb[i] = twin->second.first;
          faces_[twin->second.first].nb[twin->second.second] = id;
          open.erase(twin);
        } else {
          open.emplace(edge, std::pair{id, i});
        }
      }
    }
  }

  bool contains(const Face& f, Point p) const {
    for (int i = 0; i < 3; ++i) {
      if (orientation(pts_[f.v[i]], pts_[f.v[(i + 1) % 3]], p) == Orientation::clockwise) return false;
    }
    return true;
  }

  bool in_conflict(const Face& f, Point p) const {
    if (!is_ghost(f)) {
      return in_circumcircle(pts_[f.v[0]], pts_[f.v[1]], pts_[f.v[2]], p) == CircleSide::inside;
    }
    int k = 0;
    while (f.v[k] != kInfinite) ++k;
    const Point x = pts_[f.v[(k + 1) % 3]];
    const Point y = pts_[f.v[(k + 2) % 3]];
    // The ghost's "circumcircle" is the open half-plane beyond hull edge x->y
    // plus the open segment xy itself.
    switch (orientation(x, y, p)) {
      case Orientation::counterclockwise: return true;
      case Orientation::clockwise: return false;
      case Orientation::collinear:
        return (p.x - x.x) * (y.x - x.x) + (p.y - x.y) * (y.y - x.y) > 0.0 &&
               (p.x - y.x) * (x.x - y.x) + (p.y - y.y) * (x.y - y.y) > 0.0;
    }
    return false;
  }

  int find_seed(Point p) const {
    for (std::size_t i = 0; i < faces_.size(); ++i) {
      if (faces_[i].alive && !is_ghost(faces_[i]) && contains(faces_[i], p)) return static_cast<int>(i);
    }
    for (std::size_t i = 0; i < faces_.size(); ++i) {
      if (faces_[i].alive && is_ghost(faces_[i]) && in_conflict(faces_[i], p)) return static_cast<int>(i);
    }
    fail(ErrorCategory::numeric, "delaunay: cannot locate point (degenerate input)");
  }

  void insert(int pi) {
    const Point p = pts_[pi];
    const int seed = find_seed(p);

    std::vector<int> cavity{seed};
    std::vector<char> in_cavity(faces_.size(), 0);
    std::vector<char> visited(faces_.size(), 0);
    in_cavity[seed] = visited[seed] = 1;
    for (std::size_t q = 0; q < cavity.size(); ++q) {
      for (int nb : faces_[cavity[q]].nb) {
        if (visited[nb]) continue;
        visited[nb] = 1;
        if (in_conflict(faces_[nb], p)) {
          in_cavity[nb] = 1;
          cavity.push_back(nb);
        }
      }
    }

    struct Boundary {
      int u, v, outer, outer_slot;
    };
    std::vector<Boundary> boundary;
    for (int id : cavity) {
      const Face& f = faces_[id];
      for (int i = 0; i < 3; ++i) {
        const int nb = f.nb[i];
        if (in_cavity[nb]) continue;
        const Face& o = faces_[nb];
        const int slot = static_cast<int>(std::find(o.nb.begin(), o.nb.end(), id) - o.nb.begin());
        boundary.push_back({f.v[(i + 1) % 3], f.v[(i + 2) % 3], nb, slot});
      }
    }

    for (int id : cavity) {
      faces_[id].alive = false;
      free_.push_back(id);
    }

    std::vector<int> fresh;
    fresh.reserve(boundary.size());
    for (const Boundary& e : boundary) {
      const int id = new_face({e.u, e.v, pi});
      faces_[id].nb[2] = e.outer;
      faces_[e.outer].nb[e.outer_slot] = id;
      fresh.push_back(id);
    }
    link(fresh);
  }

  std::span<const Point> pts_;
  std::vector<Face> faces_;
  std::vector<int> free_;
};

// Flips every cocircular quadrilateral whose current diagonal does not hold
// the smallest of its four vertex indices. Each flip strictly lowers the sum
// over edges of min(endpoint index), so the loop terminates.
inline void break_cocircular_ties(std::span<const Point> pts, std::vector<std::array<std::size_t, 3>>& tris) {
  using Edge = std::pair<std::size_t, std::size_t>;
  const auto edge_of = [](std::size_t a, std::size_t b) { return a < b ? Edge{a, b} : Edge{b, a}; };
  const auto opposite = [](const std::array<std::size_t, 3>& t, std::size_t a, std::size_t b) {
    for (std::size_t v : t) {
      if (v != a && v != b) return v;
    }
    return t[0];
  };

  for (bool changed = true; changed;) {
    changed = false;
    std::map<Edge, std::vector<std::size_t>> incident;
    for (std::size_t t = 0; t < tris.size(); ++t) {
      for (int i = 0; i < 3; ++i) incident[edge_of(tris[t][i], tris[t][(i + 1) % 3])].push_back(t);
    }
    for (const auto& [edge, owners] : incident) {
      if (owners.size() != 2) continue;
      const auto [b, c] = edge;
      const std::size_t a = opposite(tris[owners[0]], b, c);
      const std::size_t d = opposite(tris[owners[1]], b, c);
      if (std::min(a, d) >= std::min(b, c)) continue;
      if (in_circumcircle(pts[a], pts[b], pts[c], pts[d]) != CircleSide::on) continue;
      // the new diagonal a-d must split the quad into two proper triangles
      const Orientation o1 = orientation(pts[a], pts[d], pts[b]);
      const Orientation o2 = orientation(pts[a], pts[d], pts[c]);
      if (o1 == Orientation::collinear || o2 == Orientation::collinear || o1 == o2) continue;
      tris[owners[0]] = {a, d, b};
      tris[owners[1]] = {a, d, c};
      changed = true;
      break;
    }
  }
}

}  // namespace detail

/// Delaunay triangulation with the area descriptor chain filled in.
/// Triangles are in canonical order: each index triple ascending, the list sorted.
inline Triangulation delaunay(std::span<const Point> points) {
  validate_landmarks({points.begin(), points.end()}, "delaunay");

  auto raw = detail::BowyerWatson(points).run();
  detail::break_cocircular_ties(points, raw);

  Triangulation t;
  t.points.assign(points.begin(), points.end());
  t.triangles.reserve(raw.size());
  for (auto v : raw) {
    std::sort(v.begin(), v.end());
    t.triangles.push_back(Triangle{v});
  }
  std::sort(t.triangles.begin(), t.triangles.end());

  t.areas.reserve(t.triangles.size());
  for (const Triangle& tri : t.triangles) {
    const Point p = points[tri.v[0]], q = points[tri.v[1]], r = points[tri.v[2]];
    t.areas.push_back(triangle_area(edge_length(p, q), edge_length(q, r), edge_length(r, p)));
  }
  t.relative_areas = relative_areas(t.areas);
  t.average_relative_area = average_relative_area(t.relative_areas);
  return t;
}

inline Triangulation delaunay(const LandmarkSet& landmarks) { return delaunay(std::span<const Point>(landmarks.points)); }

}  // namespace dtpca::geometry
