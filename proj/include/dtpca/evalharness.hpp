#pragma once

// Experiment runner: train on a deterministic per-subject split, classify
// every test image in each requested mode, tabulate percent accuracy.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dtpca/detail/atomic_file.hpp"
#include "dtpca/eigenface.hpp"
#include "dtpca/error.hpp"
#include "dtpca/image.hpp"
#include "dtpca/landmarks.hpp"
#include "dtpca/manifest.hpp"
#include "dtpca/recognizer.hpp"

namespace dtpca {

struct ExperimentConfig {
  std::filesystem::path manifest_path;
  std::size_t train_variants = 0;
  std::size_t k = kDefaultComponents;
  std::vector<MatchMode> modes{MatchMode::pca_only, MatchMode::dt_pca};
  double dt_divisor = kDefaultDtDivisor;
  // Column label for dt_pca results; empty means "use the landmark count".
  std::string landmark_scheme_label;
  // When set, manifest landmark paths are resolved relative to this directory.
  std::optional<std::filesystem::path> landmark_dir;
};

struct AccuracyRow {
  std::size_t train_count = 0;
  std::size_t test_count = 0;
  MatchMode mode = MatchMode::pca_only;
  std::string scheme;  // "none" for pca_only
  std::size_t correct = 0;
  std::size_t total = 0;
  double percent = 0.0;  // half-up rounded to one decimal

  std::string split_label() const {
    return "Train – " + std::to_string(train_count) + " Test – " + std::to_string(test_count);
  }
};

struct AccuracyTable {
  std::vector<AccuracyRow> rows;

  void append(const AccuracyTable& other) { rows.insert(rows.end(), other.rows.begin(), other.rows.end()); }
};

/// 100 * correct / total in tenths of a percent, rounded half-up.
inline std::int64_t accuracy_tenths(std::size_t correct, std::size_t total) {
  if (total == 0) fail(ErrorCategory::usage, "accuracy: total must be positive");
  if (correct > total) fail(ErrorCategory::usage, "accuracy: correct exceeds total");
  const auto c = static_cast<std::int64_t>(correct), t = static_cast<std::int64_t>(total);
  return (2000 * c + t) / (2 * t);
}

inline double accuracy(std::size_t correct, std::size_t total) {
  return static_cast<double>(accuracy_tenths(correct, total)) / 10.0;
}

inline std::string format_percent(std::size_t correct, std::size_t total) {
  const auto tenths = accuracy_tenths(correct, total);
  return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
}

namespace detail {

inline std::filesystem::path resolve_landmarks(const ManifestEntry& e, const std::optional<std::filesystem::path>& dir) {
  std::filesystem::path p = e.landmark_path;
  return dir && p.is_relative() ? *dir / p : p;
}

struct LoadedSample {
  ImageVector image;
  std::optional<LandmarkSet> landmarks;
};

inline std::vector<LoadedSample> load_samples(const DatasetManifest& manifest, bool with_landmarks,
                                              const std::optional<std::filesystem::path>& landmark_dir) {
  std::vector<LoadedSample> out;
  out.reserve(manifest.entries.size());
  for (const auto& e : manifest.entries) {
    LoadedSample s{load_image(e.image_path), std::nullopt};
    if (!out.empty() && !s.image.same_shape(out.front().image)) {
      fail(ErrorCategory::data, e.image_path + ": image is " + std::to_string(s.image.width) + "x" +
                                    std::to_string(s.image.height) + ", expected " +
                                    std::to_string(out.front().image.width) + "x" +
                                    std::to_string(out.front().image.height));
    }
    if (with_landmarks) s.landmarks = load_landmarks(resolve_landmarks(e, landmark_dir));
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace detail

/// Trains on `train`, classifies every entry of `test`. Correct means the
/// predicted subject equals the true subject.
inline AccuracyTable evaluate_split(const DatasetManifest& train, const DatasetManifest& test,
                                    const ExperimentConfig& config) {
  if (train.entries.empty() || test.entries.empty()) fail(ErrorCategory::usage, "evaluate: empty train or test set");
  if (config.modes.empty()) fail(ErrorCategory::usage, "evaluate: no modes requested");
  fused_score(0.0, 0.0, config.dt_divisor);
  const bool need_dt = std::find(config.modes.begin(), config.modes.end(), MatchMode::dt_pca) != config.modes.end();

  auto train_samples = detail::load_samples(train, need_dt, config.landmark_dir);
  auto test_samples = detail::load_samples(test, need_dt, config.landmark_dir);
  if (!test_samples.front().image.same_shape(train_samples.front().image)) {
    fail(ErrorCategory::data, test.entries.front().image_path + ": test image size differs from training images");
  }

  std::vector<ImageVector> train_images;
  train_images.reserve(train_samples.size());
  for (const auto& s : train_samples) train_images.push_back(s.image);
  const EigenModel model = fit_eigenmodel(train_images, config.k);
  train_images.clear();

  std::vector<TrainingSample> gallery_input;
  gallery_input.reserve(train_samples.size());
  for (std::size_t i = 0; i < train_samples.size(); ++i) {
    const auto& e = train.entries[i];
    gallery_input.push_back({std::move(train_samples[i].image), std::move(train_samples[i].landmarks), e.subject_id,
                             e.variant, e.image_path});
  }
  const Gallery gallery = build_gallery(model, gallery_input);

  std::vector<std::size_t> correct(config.modes.size(), 0);
  for (std::size_t t = 0; t < test_samples.size(); ++t) {
    const auto& s = test_samples[t];
    const Probe probe = make_probe(model, s.image, s.landmarks ? &*s.landmarks : nullptr);
    for (std::size_t m = 0; m < config.modes.size(); ++m) {
      const MatchReport r = match_probe(gallery, probe, config.modes[m], config.dt_divisor);
      if (r.best_subject == test.entries[t].subject_id) ++correct[m];
    }
  }

  std::string scheme_label = config.landmark_scheme_label;
  if (scheme_label.empty() && gallery.scheme) scheme_label = std::to_string(*gallery.scheme);

  AccuracyTable table;
  for (std::size_t m = 0; m < config.modes.size(); ++m) {
    AccuracyRow row;
    row.train_count = train.entries.size();
    row.test_count = test.entries.size();
    row.mode = config.modes[m];
    row.scheme = row.mode == MatchMode::pca_only ? "none" : scheme_label;
    row.correct = correct[m];
    row.total = test.entries.size();
    row.percent = accuracy(row.correct, row.total);
    table.rows.push_back(row);
  }
  return table;
}

inline AccuracyTable run_experiment(const ExperimentConfig& config) {
  if (config.k < 1) fail(ErrorCategory::usage, "k must be at least 1");
  const DatasetManifest manifest = load_manifest(config.manifest_path);
  const DatasetSplit split = split_dataset(manifest, config.train_variants);
  return evaluate_split(split.train, split.test, config);
}

// ---- reports --------------------------------------------------------------

enum class ReportFormat { text, csv };

inline ReportFormat parse_report_format(const std::string& s) {
  if (s == "text") return ReportFormat::text;
  if (s == "csv") return ReportFormat::csv;
  fail(ErrorCategory::usage, "unknown report format '" + s + "' (expected text or csv)");
}

namespace detail {

// Display width in code points; labels may contain the en dash.
inline std::size_t display_width(const std::string& s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) { return (c & 0xC0) != 0x80; }));
}

inline std::string pad(const std::string& s, std::size_t width) {
  const std::size_t w = display_width(s);
  return w >= width ? s : s + std::string(width - w, ' ');
}

}  // namespace detail

inline std::string render_csv(const AccuracyTable& table) {
  std::string out = "split,mode,scheme,correct,total,percent\n";
  for (const auto& r : table.rows) {
    out += std::to_string(r.train_count) + "/" + std::to_string(r.test_count) + "," + to_string(r.mode) + "," +
           r.scheme + "," + std::to_string(r.correct) + "," + std::to_string(r.total) + "," +
           format_percent(r.correct, r.total) + "\n";
  }
  return out;
}

/// Rows per split, columns "Traditional PCA" then one "<scheme>-L" per dt_pca scheme.
inline std::string render_text(const AccuracyTable& table) {
  std::vector<std::pair<std::size_t, std::size_t>> splits;
  std::vector<std::string> schemes;
  bool has_pca = false;
  for (const auto& r : table.rows) {
    const std::pair split{r.train_count, r.test_count};
    if (std::find(splits.begin(), splits.end(), split) == splits.end()) splits.push_back(split);
    if (r.mode == MatchMode::pca_only) {
      has_pca = true;
    } else if (std::find(schemes.begin(), schemes.end(), r.scheme) == schemes.end()) {
      schemes.push_back(r.scheme);
    }
  }

  std::vector<std::string> header{""};
  if (has_pca) header.push_back("Traditional PCA");
  for (const auto& s : schemes) header.push_back(s + "-L");

  std::vector<std::vector<std::string>> cells{header};
  for (const auto& [train, test] : splits) {
    AccuracyRow probe;
    probe.train_count = train;
    probe.test_count = test;
    std::vector<std::string> line{probe.split_label()};
    const auto cell = [&](MatchMode mode, const std::string* scheme) {
      for (const auto& r : table.rows) {
        if (r.train_count == train && r.test_count == test && r.mode == mode && (!scheme || r.scheme == *scheme)) {
          return format_percent(r.correct, r.total) + " %";
        }
      }
      return std::string("-");
    };
    if (has_pca) line.push_back(cell(MatchMode::pca_only, nullptr));
    for (const auto& s : schemes) line.push_back(cell(MatchMode::dt_pca, &s));
    cells.push_back(std::move(line));
  }

  std::vector<std::size_t> widths(header.size(), 0);
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size(); ++c) widths[c] = std::max(widths[c], detail::display_width(line[c]));
  }
  std::string out;
  for (const auto& line : cells) {
    std::string text;
    for (std::size_t c = 0; c < line.size(); ++c) {
      if (c > 0) text += " | ";
      text += c + 1 == line.size() ? line[c] : detail::pad(line[c], widths[c]);
    }
    out += text + "\n";
  }
  return out;
}

inline std::string render_report(const AccuracyTable& table, ReportFormat format) {
  if (table.rows.empty()) fail(ErrorCategory::usage, "report: empty accuracy table");
  return format == ReportFormat::csv ? render_csv(table) : render_text(table);
}

inline void emit_report(const AccuracyTable& table, ReportFormat format, const std::filesystem::path& path) {
  detail::write_file_atomically(path, render_report(table, format));
}

}  // namespace dtpca
