#pragma once

// Precomputed facial landmarks: one "x,y" pair per line, no header.

#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "dtpca/error.hpp"
#include "dtpca/geometry/point.hpp"
#include "dtpca/geometry/predicates.hpp"

namespace dtpca {

using geometry::Point;

struct LandmarkSet {
  std::vector<Point> points;
  // Declared landmark count label (68, 79, 194, ...). Set from the line count on load.
  std::size_t scheme = 0;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto not_space = [](char c) { return c != ' ' && c != '\t' && c != '\r' && c != '\n'; };
  while (!s.empty() && !not_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && !not_space(s.back())) s.remove_suffix(1);
  return s;
}

inline bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

/// Splits text into lines, accepting LF or CRLF. A final newline does not produce an empty line.
inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return lines;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCategory::data, path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct PointHash {
  std::size_t operator()(const Point& p) const noexcept {
    const std::size_t hx = std::hash<double>{}(p.x);
    return hx ^ (std::hash<double>{}(p.y) + 0x9e3779b97f4a7c15ULL + (hx << 6) + (hx >> 2));
  }
};

}  // namespace detail

/// Checks count >= 3, pairwise-distinct points and non-collinearity.
inline void validate_landmarks(const std::vector<Point>& points, const std::string& name) {
  if (points.size() < 3) {
    fail(ErrorCategory::data, name + ": need at least 3 landmarks, found " + std::to_string(points.size()));
  }
  std::unordered_set<Point, detail::PointHash> seen;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!seen.insert(points[i]).second) {
      fail(ErrorCategory::data, name + ": duplicate point at line " + std::to_string(i + 1));
    }
  }
  for (std::size_t k = 2; k < points.size(); ++k) {
    if (!geometry::collinear(points[0], points[1], points[k])) return;
  }
  fail(ErrorCategory::data, name + ": all landmarks are collinear");
}

inline LandmarkSet parse_landmarks(std::string_view text, const std::string& name = "<memory>") {
  LandmarkSet set;
  const auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = lines[i];
    const auto comma = line.find(',');
    Point p;
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos ||
        !detail::parse_double(line.substr(0, comma), p.x) ||
        !detail::parse_double(line.substr(comma + 1), p.y)) {
      fail(ErrorCategory::data, name + ": unparsable landmark at line " + std::to_string(i + 1));
    }
    set.points.push_back(p);
  }
  validate_landmarks(set.points, name);
  set.scheme = set.points.size();
  return set;
}

inline LandmarkSet load_landmarks(const std::filesystem::path& path) {
  return parse_landmarks(detail::read_text_file(path), path.string());
}

}  // namespace dtpca
