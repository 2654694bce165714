#pragma once

// Shared test fixtures: scratch directories, random point sets and a
// synthetic face-like dataset (PGM images + landmark CSVs + manifest).

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "dtpca/geometry/point.hpp"
#include "dtpca/geometry/predicates.hpp"
#include "dtpca/image.hpp"
#include "dtpca/manifest.hpp"

namespace testing_support {

namespace fs = std::filesystem;
using dtpca::geometry::Point;

class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("dtpca_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::vector<Point> random_points(std::mt19937_64& rng, std::size_t n, double lo = 0.0, double hi = 1000.0) {
  std::uniform_real_distribution<double> coord(lo, hi);
  std::vector<Point> pts(n);
  for (auto& p : pts) p = {coord(rng), coord(rng)};
  return pts;
}

/// No three points collinear and no four cocircular, judged with a wide margin
/// around the library's predicate tolerance so every classification is unambiguous.
inline bool general_position(const std::vector<Point>& pts) {
  using dtpca::geometry::signed_area2;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        if (std::fabs(signed_area2(pts[i], pts[j], pts[k])) < 1e-6) return false;
        for (std::size_t m = k + 1; m < n; ++m) {
          using ld = long double;
          const Point p = pts[m];
          ld rows[3][3];
          const Point tri[3] = {pts[i], pts[j], pts[k]};
          for (int r = 0; r < 3; ++r) {
            const ld dx = (ld)tri[r].x - p.x, dy = (ld)tri[r].y - p.y;
            rows[r][0] = dx;
            rows[r][1] = dy;
            rows[r][2] = dx * dx + dy * dy;
          }
          const ld det = rows[0][0] * (rows[1][1] * rows[2][2] - rows[1][2] * rows[2][1]) -
                         rows[0][1] * (rows[1][0] * rows[2][2] - rows[1][2] * rows[2][0]) +
                         rows[0][2] * (rows[1][0] * rows[2][1] - rows[1][1] * rows[2][0]);
          ld scale = 0;
          for (auto& row : rows) scale = std::max(scale, std::fabs(row[2]));
          const ld span = std::sqrt(scale);
          if (std::fabs(det) < 1e-8L * scale * span * span) return false;
        }
      }
  return true;
}

struct SyntheticDataset {
  fs::path manifest;
  std::vector<dtpca::ManifestEntry> entries;
};

struct SyntheticSpec {
  std::size_t subjects = 15;
  std::size_t variants = 9;
  std::size_t width = 32;
  std::size_t height = 24;
  std::size_t landmarks = 68;
  double image_noise = 0.04;     // per-pixel noise amplitude for each variant
  double landmark_jitter = 0.6;  // per-variant landmark displacement, pixels
  std::uint64_t seed = 7;
};

/// Writes `subjects x variants` images, landmark files and a manifest under `dir`.
/// Each subject has its own smooth intensity pattern and landmark layout; variants
/// add illumination shifts, noise and landmark jitter.
inline SyntheticDataset make_synthetic_dataset(const fs::path& dir, const SyntheticSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  fs::create_directories(dir / "img");
  fs::create_directories(dir / "lm");

  const double w = static_cast<double>(spec.width), h = static_cast<double>(spec.height);
  SyntheticDataset out;
  std::string manifest_text(dtpca::kManifestHeader);
  manifest_text += '\n';

  for (std::size_t s = 0; s < spec.subjects; ++s) {
    struct Blob {
      double cx, cy, r, amp;
    };
    std::vector<Blob> blobs(6);
    for (auto& b : blobs) b = {unit(rng) * w, unit(rng) * h, (0.1 + 0.25 * unit(rng)) * w, 0.5 * unit(rng) - 0.25};
    std::vector<Point> base(spec.landmarks);
    for (std::size_t i = 0; i < spec.landmarks; ++i) {
      // spread over an ellipse so the mesh has face-like aspect and varied areas
      const double t = unit(rng) * 2 * M_PI, rad = std::sqrt(unit(rng));
      base[i] = {w / 2 + 0.42 * w * rad * std::cos(t), h / 2 + 0.45 * h * rad * std::sin(t)};
    }

    for (std::size_t v = 0; v < spec.variants; ++v) {
      const std::string subject = "s" + std::string(s < 9 ? "0" : "") + std::to_string(s + 1);
      const std::string variant = "v" + std::to_string(v + 1);
      dtpca::ImageVector img;
      img.width = spec.width;
      img.height = spec.height;
      const double shift = 0.06 * gauss(rng);
      const double gx = 0.04 * gauss(rng);
      for (std::size_t y = 0; y < spec.height; ++y)
        for (std::size_t x = 0; x < spec.width; ++x) {
          double val = 0.5 + shift + gx * (static_cast<double>(x) / w - 0.5);
          for (const auto& b : blobs) {
            const double dx = x - b.cx, dy = y - b.cy;
            val += b.amp * std::exp(-(dx * dx + dy * dy) / (2 * b.r * b.r));
          }
          val += spec.image_noise * gauss(rng);
          img.values.push_back(std::round(std::clamp(val, 0.0, 1.0) * 255.0) / 255.0);
        }
      const fs::path img_path = dir / "img" / (subject + "_" + variant + ".pgm");
      dtpca::write_pgm(img, img_path);

      std::string lm;
      for (const auto& p : base) {
        const double x = p.x + spec.landmark_jitter * gauss(rng);
        const double y = p.y + spec.landmark_jitter * gauss(rng);
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6f,%.6f\n", x, y);
        lm += buf;
      }
      const fs::path lm_path = dir / "lm" / (subject + "_" + variant + ".csv");
      write_text(lm_path, lm);

      dtpca::ManifestEntry e{img_path.string(), subject, variant, lm_path.string()};
      manifest_text += e.image_path + "," + e.subject_id + "," + e.variant + "," + e.landmark_path + "\n";
      out.entries.push_back(e);
    }
  }
  out.manifest = dir / "manifest.csv";
  write_text(out.manifest, manifest_text);
  return out;
}

}  // namespace testing_support
