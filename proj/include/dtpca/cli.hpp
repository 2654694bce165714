#pragma once

// dtpca command-line front end: triangulate, train, recognize, evaluate.
// Exit codes: 0 success, 1 usage, 2 data/format, 3 numeric.

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dtpca/detail/atomic_file.hpp"
#include "dtpca/eigenface.hpp"
#include "dtpca/error.hpp"
#include "dtpca/evalharness.hpp"
#include "dtpca/geometry/delaunay.hpp"
#include "dtpca/landmarks.hpp"
#include "dtpca/manifest.hpp"
#include "dtpca/recognizer.hpp"
#include "json.hpp"

namespace dtpca::cli {

inline nlohmann::ordered_json triangulation_to_json(const geometry::Triangulation& t) {
  nlohmann::ordered_json j;
  auto points = nlohmann::ordered_json::array();
  for (const auto& p : t.points) points.push_back({p.x, p.y});
  auto tris = nlohmann::ordered_json::array();
  for (const auto& tri : t.triangles) tris.push_back({tri.v[0], tri.v[1], tri.v[2]});
  j["points"] = std::move(points);
  j["triangles"] = std::move(tris);
  j["areas"] = t.areas;
  j["relative_areas"] = t.relative_areas;
  j["average_relative_area"] = t.average_relative_area;
  return j;
}

namespace detail {

inline std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

inline void write_output(const std::optional<std::string>& path, const std::string& text, std::ostream& out) {
  if (path) {
    dtpca::detail::write_file_atomically(*path, text);
  } else {
    out << text;
  }
}

struct TriangulateArgs {
  std::string landmarks;
  std::optional<std::string> out;
};

struct TrainArgs {
  std::string manifest;
  std::size_t k = kDefaultComponents;
  std::string out;
  std::optional<std::string> scheme_dir;
};

struct RecognizeArgs {
  std::string gallery;
  std::string image;
  std::optional<std::string> landmarks;
  std::string mode;
  double dt_divisor = kDefaultDtDivisor;
};

struct EvaluateArgs {
  std::optional<std::string> config;
  std::optional<std::string> manifest;
  std::optional<std::size_t> train_variants;
  std::string modes = "pca-only,dt-pca";
  double dt_divisor = kDefaultDtDivisor;
  std::string report = "text";
  std::optional<std::string> out;
};

inline void cmd_triangulate(const TriangulateArgs& a, std::ostream& out) {
  const LandmarkSet set = load_landmarks(a.landmarks);
  const auto mesh = geometry::delaunay(set);
  write_output(a.out, triangulation_to_json(mesh).dump() + "\n", out);
}

inline void cmd_train(const TrainArgs& a) {
  if (a.k < 1) fail(ErrorCategory::usage, "--k must be at least 1");
  const DatasetManifest manifest = load_manifest(a.manifest);
  std::optional<std::filesystem::path> dir;
  if (a.scheme_dir) dir = *a.scheme_dir;
  auto samples = dtpca::detail::load_samples(manifest, true, dir);
  if (samples.size() < 2) {
    fail(ErrorCategory::data, a.manifest + ": need at least 2 training images, got " + std::to_string(samples.size()));
  }
  std::vector<ImageVector> images;
  images.reserve(samples.size());
  for (const auto& s : samples) images.push_back(s.image);
  const EigenModel model = fit_eigenmodel(images, a.k);
  images.clear();

  std::vector<TrainingSample> input;
  input.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& e = manifest.entries[i];
    input.push_back({std::move(samples[i].image), std::move(samples[i].landmarks), e.subject_id, e.variant,
                     e.image_path});
  }
  save_gallery(build_gallery(model, input), model, a.out);
}

inline void cmd_recognize(const RecognizeArgs& a, std::ostream& out) {
  const MatchMode mode = parse_match_mode(a.mode);
  if (mode == MatchMode::dt_pca && !a.landmarks) fail(ErrorCategory::usage, "--mode dt-pca requires --landmarks");
  fused_score(0.0, 0.0, a.dt_divisor);
  const LoadedGallery loaded = load_gallery(a.gallery);
  const ImageVector image = load_image(a.image);
  std::optional<LandmarkSet> landmarks;
  if (mode == MatchMode::dt_pca) landmarks = load_landmarks(*a.landmarks);
  const MatchReport report =
      recognize(loaded.gallery, loaded.model, image, landmarks ? &*landmarks : nullptr, mode, a.dt_divisor);
  out << report_to_json(report, loaded.gallery).dump() << "\n";
}

inline std::vector<MatchMode> parse_modes(const std::string& list) {
  std::vector<MatchMode> modes;
  std::stringstream ss(list);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item.empty()) continue;
    const MatchMode m = parse_match_mode(item);
    if (std::find(modes.begin(), modes.end(), m) == modes.end()) modes.push_back(m);
  }
  if (modes.empty()) fail(ErrorCategory::usage, "--modes must name at least one mode");
  return modes;
}

// Config file: {"manifest": path, "train_variants": N or [N, ...], "k": 25,
//               "modes": ["pca_only", "dt_pca"], "dt_divisor": 0.001,
//               "schemes": [{"label": "68", "landmark_dir": path}, ...]}
inline std::vector<ExperimentConfig> configs_from_json(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(dtpca::detail::read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCategory::data, path + ": malformed config: " + e.what());
  }
  std::vector<ExperimentConfig> configs;
  try {
    ExperimentConfig base;
    base.manifest_path = j.at("manifest").get<std::string>();
    base.k = j.value("k", kDefaultComponents);
    base.dt_divisor = j.value("dt_divisor", kDefaultDtDivisor);
    if (j.contains("modes")) {
      base.modes.clear();
      for (const auto& m : j["modes"]) base.modes.push_back(parse_match_mode(m.get<std::string>()));
    }
    std::vector<std::size_t> splits;
    if (j.at("train_variants").is_array()) {
      splits = j["train_variants"].get<std::vector<std::size_t>>();
    } else {
      splits.push_back(j["train_variants"].get<std::size_t>());
    }
    std::vector<std::pair<std::string, std::optional<std::filesystem::path>>> schemes;
    if (j.contains("schemes")) {
      for (const auto& s : j["schemes"]) {
        std::optional<std::filesystem::path> dir;
        if (s.contains("landmark_dir")) dir = s["landmark_dir"].get<std::string>();
        schemes.emplace_back(s.value("label", std::string{}), dir);
      }
    }
    if (schemes.empty()) schemes.emplace_back(std::string{}, std::nullopt);

    for (std::size_t split : splits) {
      for (std::size_t i = 0; i < schemes.size(); ++i) {
        ExperimentConfig c = base;
        c.train_variants = split;
        c.landmark_scheme_label = schemes[i].first;
        c.landmark_dir = schemes[i].second;
        // the landmark-free baseline only needs to run once per split
        if (i > 0) std::erase(c.modes, MatchMode::pca_only);
        if (!c.modes.empty()) configs.push_back(std::move(c));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCategory::data, path + ": malformed config: " + e.what());
  }
  if (configs.empty()) fail(ErrorCategory::usage, path + ": config describes no runs");
  return configs;
}

inline void cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const ReportFormat format = parse_report_format(a.report);
  std::vector<ExperimentConfig> configs;
  if (a.config) {
    configs = configs_from_json(*a.config);
  } else {
    if (!a.manifest || !a.train_variants) {
      fail(ErrorCategory::usage, "evaluate needs --manifest and --train-variants (or --config)");
    }
    ExperimentConfig c;
    c.manifest_path = *a.manifest;
    c.train_variants = *a.train_variants;
    c.modes = parse_modes(a.modes);
    c.dt_divisor = a.dt_divisor;
    configs.push_back(std::move(c));
  }
  AccuracyTable table;
  for (const auto& c : configs) table.append(run_experiment(c));
  write_output(a.out, render_report(table, format), out);
}

}  // namespace detail

/// Runs the CLI on `args` (without the program name). Never throws.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Face recognition with eigenfaces fused with Delaunay landmark-mesh area statistics", "dtpca"};
  app.require_subcommand(1);

  detail::TriangulateArgs tri;
  auto* triangulate = app.add_subcommand("triangulate", "Delaunay-triangulate a landmark file and print the mesh as JSON");
  triangulate->add_option("--landmarks", tri.landmarks, "Landmark CSV (x,y per line)")->required();
  triangulate->add_option("--out", tri.out, "Output path (default: stdout)");

  detail::TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Fit the eigenspace and write a gallery file");
  train_cmd->add_option("--manifest", train.manifest, "Manifest CSV")->required();
  train_cmd->add_option("--k", train.k, "Number of eigenfaces to keep")->capture_default_str();
  train_cmd->add_option("--out", train.out, "Gallery output path")->required();
  train_cmd->add_option("--scheme-dir", train.scheme_dir, "Directory that relative landmark paths resolve against");

  detail::RecognizeArgs rec;
  auto* recognize_cmd = app.add_subcommand("recognize", "Match one image against a gallery");
  recognize_cmd->add_option("--gallery", rec.gallery, "Gallery file")->required();
  recognize_cmd->add_option("--image", rec.image, "Test image (PGM)")->required();
  recognize_cmd->add_option("--landmarks", rec.landmarks, "Test landmark CSV (dt-pca only)");
  recognize_cmd->add_option("--mode", rec.mode, "pca-only or dt-pca")->required();
  recognize_cmd->add_option("--dt-divisor", rec.dt_divisor, "Divisor applied to the area difference")
      ->capture_default_str();

  detail::EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Run a train/test experiment and print an accuracy report");
  auto* cfg_opt = evaluate->add_option("--config", ev.config, "Experiment config JSON");
  auto* man_opt = evaluate->add_option("--manifest", ev.manifest, "Manifest CSV");
  auto* tv_opt = evaluate->add_option("--train-variants", ev.train_variants, "Training variants per subject");
  evaluate->add_option("--modes", ev.modes, "Comma-separated list of pca-only, dt-pca")->capture_default_str();
  evaluate->add_option("--dt-divisor", ev.dt_divisor, "Divisor applied to the area difference")
      ->capture_default_str();
  evaluate->add_option("--report", ev.report, "text or csv")->capture_default_str();
  evaluate->add_option("--out", ev.out, "Report output path (default: stdout)");
  cfg_opt->excludes(man_opt)->excludes(tv_opt);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    if (msg.empty()) msg = "invalid arguments";
    err << "error: usage: " << detail::one_line(msg) << "\n";
    return exit_code(ErrorCategory::usage);
  }

  try {
    if (*triangulate) detail::cmd_triangulate(tri, out);
    if (*train_cmd) detail::cmd_train(train);
    if (*recognize_cmd) detail::cmd_recognize(rec, out);
    if (*evaluate) detail::cmd_evaluate(ev, out);
  } catch (const Error& e) {
    err << "error: " << to_string(e.category()) << ": " << detail::one_line(e.what()) << "\n";
    return exit_code(e.category());
  } catch (const std::bad_alloc&) {
    err << "error: numeric: out of memory\n";
    return exit_code(ErrorCategory::numeric);
  } catch (const std::exception& e) {
    err << "error: data: " << detail::one_line(e.what()) << "\n";
    return exit_code(ErrorCategory::data);
  }
  return 0;
}

}  // namespace dtpca::cli
