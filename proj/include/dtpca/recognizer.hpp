#pragma once

// Match gallery and the fused nearest-match rule
//
//   RV = ED + D / divisor
//
// where ED is the eigenspace distance between probe and gallery entry and D
// is the absolute difference of their average relative triangle areas.

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dtpca/detail/atomic_file.hpp"
#include "dtpca/eigenface.hpp"
#include "dtpca/error.hpp"
#include "dtpca/geometry/delaunay.hpp"
#include "dtpca/image.hpp"
#include "dtpca/landmarks.hpp"
#include "json.hpp"

namespace dtpca {

inline constexpr double kDefaultDtDivisor = 0.001;
inline constexpr int kGalleryFormatVersion = 1;

enum class MatchMode { pca_only, dt_pca };

inline std::string to_string(MatchMode m) { return m == MatchMode::pca_only ? "pca_only" : "dt_pca"; }

/// Accepts "pca_only"/"dt_pca" and the CLI spellings "pca-only"/"dt-pca".
inline MatchMode parse_match_mode(const std::string& s) {
  if (s == "pca_only" || s == "pca-only") return MatchMode::pca_only;
  if (s == "dt_pca" || s == "dt-pca") return MatchMode::dt_pca;
  fail(ErrorCategory::usage, "unknown mode '" + s + "' (expected pca-only or dt-pca)");
}

struct GalleryEntry {
  std::string subject_id;
  std::string variant;
  EigenCoords coords;
  std::optional<double> ra_avg;  // absent when the gallery was built without landmarks
  std::string source_path;
};

struct Gallery {
  std::vector<GalleryEntry> entries;
  std::optional<std::size_t> scheme;  // landmark count shared by every entry

  bool has_landmarks() const noexcept { return scheme.has_value(); }
};

struct TrainingSample {
  ImageVector image;
  std::optional<LandmarkSet> landmarks;
  std::string subject_id;
  std::string variant;
  std::string source_path;
};

/// Either every sample carries landmarks or none does.
inline Gallery build_gallery(const EigenModel& model, std::span<const TrainingSample> train) {
  if (train.empty()) fail(ErrorCategory::data, "build_gallery: empty training set");
  const bool with_landmarks = train.front().landmarks.has_value();
  Gallery gallery;
  gallery.entries.reserve(train.size());
  for (const auto& s : train) {
    if (s.landmarks.has_value() != with_landmarks) {
      fail(ErrorCategory::data, "build_gallery: " + s.source_path + ": landmarks must be given for all or none");
    }
    GalleryEntry e{s.subject_id, s.variant, project(model, s.image), std::nullopt, s.source_path};
    if (with_landmarks) {
      if (gallery.scheme && *gallery.scheme != s.landmarks->scheme) {
        fail(ErrorCategory::data, "build_gallery: " + s.source_path + ": landmark scheme " +
                                      std::to_string(s.landmarks->scheme) + " differs from gallery scheme " +
                                      std::to_string(*gallery.scheme));
      }
      gallery.scheme = s.landmarks->scheme;
      e.ra_avg = geometry::delaunay(*s.landmarks).average_relative_area;
    }
    gallery.entries.push_back(std::move(e));
  }
  return gallery;
}

/// |Tt_avg - Tn_avg|, i.e. sqrt((Tt_avg - Tn_avg)^2).
inline double dt_difference(double tt_avg, double tn_avg) {
  if (!(tt_avg > 0.0 && tt_avg <= 1.0 && tn_avg > 0.0 && tn_avg <= 1.0)) {
    fail(ErrorCategory::data, "dt_difference: average relative areas must lie in (0, 1]");
  }
  return std::fabs(tt_avg - tn_avg);
}

inline double fused_score(double ed, double d, double dt_divisor = kDefaultDtDivisor) {
  if (!(dt_divisor > 0.0) || !std::isfinite(dt_divisor)) {
    fail(ErrorCategory::usage, "fused_score: divisor must be positive and finite");
  }
  if (!(ed >= 0.0) || !(d >= 0.0)) fail(ErrorCategory::data, "fused_score: ED and D must be non-negative");
  return ed + d / dt_divisor;
}

struct EntryScore {
  double ed = 0.0;
  double d = 0.0;
  double rv = 0.0;
};

struct MatchReport {
  std::size_t best_index = 0;
  std::string best_subject;
  std::vector<EntryScore> scores;
  MatchMode mode = MatchMode::dt_pca;
  double dt_divisor = kDefaultDtDivisor;
};

/// A probe reduced to what matching needs: eigenspace coordinates and, for
/// dt_pca, its average relative area and landmark scheme.
struct Probe {
  EigenCoords coords;
  std::optional<double> ra_avg;
  std::optional<std::size_t> scheme;
};

inline Probe make_probe(const EigenModel& model, const ImageVector& image, const LandmarkSet* landmarks) {
  Probe p{project(model, image), std::nullopt, std::nullopt};
  if (landmarks) {
    p.ra_avg = geometry::delaunay(*landmarks).average_relative_area;
    p.scheme = landmarks->scheme;
  }
  return p;
}

/// Scores every gallery entry; best is the lowest RV with ties going to the lowest index.
inline MatchReport match_probe(const Gallery& gallery, const Probe& probe, MatchMode mode,
                               double dt_divisor = kDefaultDtDivisor) {
  if (gallery.entries.empty()) fail(ErrorCategory::data, "recognize: empty gallery");
  if (mode == MatchMode::dt_pca) {
    if (!probe.ra_avg) fail(ErrorCategory::usage, "recognize: dt_pca mode requires test landmarks");
    if (!gallery.has_landmarks()) fail(ErrorCategory::data, "recognize: gallery was built without landmarks");
    if (probe.scheme != gallery.scheme) {
      fail(ErrorCategory::data, "recognize: test landmark scheme " + std::to_string(probe.scheme.value_or(0)) +
                                    " does not match gallery scheme " + std::to_string(*gallery.scheme));
    }
  }
  // validates the divisor even in pca_only mode
  fused_score(0.0, 0.0, dt_divisor);

  MatchReport report;
  report.mode = mode;
  report.dt_divisor = dt_divisor;
  report.scores.reserve(gallery.entries.size());
  for (std::size_t i = 0; i < gallery.entries.size(); ++i) {
    const GalleryEntry& e = gallery.entries[i];
    EntryScore s;
    s.ed = eigen_distance(probe.coords, e.coords);
    s.d = mode == MatchMode::dt_pca ? dt_difference(*probe.ra_avg, *e.ra_avg) : 0.0;
    s.rv = mode == MatchMode::dt_pca ? fused_score(s.ed, s.d, dt_divisor) : s.ed;
    if (i == 0 || s.rv < report.scores[report.best_index].rv) report.best_index = i;
    report.scores.push_back(s);
  }
  report.best_subject = gallery.entries[report.best_index].subject_id;
  return report;
}

/// `test_landmarks` may be null in pca_only mode, where it is ignored.
inline MatchReport recognize(const Gallery& gallery, const EigenModel& model, const ImageVector& test_image,
                             const LandmarkSet* test_landmarks, MatchMode mode,
                             double dt_divisor = kDefaultDtDivisor) {
  if (mode == MatchMode::dt_pca && !test_landmarks) {
    fail(ErrorCategory::usage, "recognize: dt_pca mode requires test landmarks");
  }
  const Probe probe = make_probe(model, test_image, mode == MatchMode::dt_pca ? test_landmarks : nullptr);
  return match_probe(gallery, probe, mode, dt_divisor);
}

inline nlohmann::ordered_json report_to_json(const MatchReport& report, const Gallery& gallery) {
  nlohmann::ordered_json j;
  j["mode"] = to_string(report.mode);
  j["dt_divisor"] = report.dt_divisor;
  const GalleryEntry& best = gallery.entries.at(report.best_index);
  j["best"] = {{"index", report.best_index}, {"subject", best.subject_id}, {"variant", best.variant}};
  auto scores = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < report.scores.size(); ++i) {
    const auto& s = report.scores[i];
    scores.push_back({{"index", i},
                      {"subject", gallery.entries[i].subject_id},
                      {"variant", gallery.entries[i].variant},
                      {"ed", s.ed},
                      {"d", s.d},
                      {"rv", s.rv}});
  }
  j["scores"] = std::move(scores);
  return j;
}

// ---- persistence ----------------------------------------------------------

inline std::string gallery_to_string(const Gallery& gallery, const EigenModel& model) {
  nlohmann::ordered_json j;
  j["format_version"] = kGalleryFormatVersion;
  j["model"] = model_to_json(model);
  j["scheme"] = gallery.scheme ? nlohmann::ordered_json(*gallery.scheme) : nlohmann::ordered_json(nullptr);
  auto entries = nlohmann::ordered_json::array();
  for (const auto& e : gallery.entries) {
    nlohmann::ordered_json item;
    item["subject"] = e.subject_id;
    item["variant"] = e.variant;
    item["ra_avg"] = e.ra_avg ? nlohmann::ordered_json(*e.ra_avg) : nlohmann::ordered_json(nullptr);
    item["coords"] = e.coords.values;
    item["source"] = e.source_path;
    entries.push_back(std::move(item));
  }
  j["entries"] = std::move(entries);
  return j.dump() + "\n";
}

struct LoadedGallery {
  Gallery gallery;
  EigenModel model;
};

inline LoadedGallery gallery_from_string(const std::string& text, const std::string& name = "<gallery>") {
  const auto bad = [&](const std::string& what) { fail(ErrorCategory::data, name + ": " + what); };
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    bad(std::string("malformed gallery file: ") + e.what());
  }
  if (!j.is_object() || !j.contains("format_version") || !j.contains("model") || !j.contains("entries")) {
    bad("malformed gallery file: missing format_version, model or entries");
  }
  if (!j["format_version"].is_number_integer() || j["format_version"].get<int>() != kGalleryFormatVersion) {
    bad("unsupported gallery format_version " + j["format_version"].dump());
  }
  LoadedGallery out;
  out.model = model_from_json(j["model"]);
  try {
    if (j.contains("scheme") && !j["scheme"].is_null()) out.gallery.scheme = j["scheme"].get<std::size_t>();
    for (const auto& item : j.at("entries")) {
      GalleryEntry e;
      e.subject_id = item.at("subject").get<std::string>();
      e.variant = item.at("variant").get<std::string>();
      e.coords.values = item.at("coords").get<std::vector<double>>();
      e.source_path = item.value("source", std::string{});
      if (e.coords.size() != out.model.k()) {
        bad("entry for " + e.subject_id + "/" + e.variant + " has " + std::to_string(e.coords.size()) +
            " coordinates, model k is " + std::to_string(out.model.k()));
      }
      const auto& ra = item.at("ra_avg");
      if (!ra.is_null()) {
        e.ra_avg = ra.get<double>();
        if (!(*e.ra_avg > 0.0 && *e.ra_avg <= 1.0)) bad("ra_avg out of (0, 1]");
      }
      if (e.ra_avg.has_value() != out.gallery.scheme.has_value()) bad("ra_avg presence disagrees with scheme");
      out.gallery.entries.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("malformed gallery entry: ") + e.what());
  }
  if (out.gallery.entries.empty()) bad("gallery has no entries");
  return out;
}

inline void save_gallery(const Gallery& gallery, const EigenModel& model, const std::filesystem::path& path) {
  detail::write_file_atomically(path, gallery_to_string(gallery, model));
}

inline LoadedGallery load_gallery(const std::filesystem::path& path) {
  return gallery_from_string(detail::read_text_file(path), path.string());
}

}  // namespace dtpca
