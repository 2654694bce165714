#pragma once

// Eigenface model: mean face, top-k principal directions of the centered
// training images, projection, reconstruction and eigenspace distance.
//
// Directions are recovered with the snapshot method. For n images of d pixels
// (n << d) the n x n Gram matrix X X^T of the centered rows shares its nonzero
// eigenvalues with the d x d scatter X^T X, and each Gram eigenvector v lifts
// to a scatter eigenvector X^T v / sqrt(lambda).

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dtpca/error.hpp"
#include "dtpca/image.hpp"
#include "json.hpp"

namespace dtpca {

inline constexpr std::size_t kDefaultComponents = 25;

enum class Centering {
  image_minus_mean,  // x - M, the default
  mean_minus_image,  // M - x
};

struct EigenModel {
  std::size_t width = 0;
  std::size_t height = 0;
  Eigen::VectorXd mean;          // d
  Eigen::MatrixXd eigenvectors;  // d x k, orthonormal columns, descending eigenvalue
  Eigen::VectorXd eigenvalues;   // k, sigma^2 / (n - 1)
  std::size_t requested_k = 0;   // k asked for before clamping to the rank
  Centering centering = Centering::image_minus_mean;

  std::size_t k() const noexcept { return static_cast<std::size_t>(eigenvectors.cols()); }
  std::size_t pixels() const noexcept { return width * height; }
  bool clamped() const noexcept { return k() < requested_k; }
};

struct EigenCoords {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  friend bool operator==(const EigenCoords&, const EigenCoords&) = default;
};

namespace detail {

inline void require_same_shape(std::span<const ImageVector> images, std::size_t width, std::size_t height) {
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (images[i].width != width || images[i].height != height ||
        images[i].values.size() != width * height) {
      fail(ErrorCategory::data, "image " + std::to_string(i) + " is " + std::to_string(images[i].width) +
                                    "x" + std::to_string(images[i].height) + ", expected " +
                                    std::to_string(width) + "x" + std::to_string(height));
    }
  }
}

inline Eigen::Map<const Eigen::VectorXd> as_vector(const ImageVector& img) {
  return {img.values.data(), static_cast<Eigen::Index>(img.values.size())};
}

inline void require_model_shape(const EigenModel& model, const ImageVector& img) {
  if (img.width != model.width || img.height != model.height || img.values.size() != model.pixels()) {
    fail(ErrorCategory::data, "image is " + std::to_string(img.width) + "x" + std::to_string(img.height) +
                                  ", model expects " + std::to_string(model.width) + "x" +
                                  std::to_string(model.height));
  }
}

}  // namespace detail

inline ImageVector mean_image(std::span<const ImageVector> images) {
  if (images.empty()) fail(ErrorCategory::data, "mean_image: no images");
  detail::require_same_shape(images, images.front().width, images.front().height);
  ImageVector mean;
  mean.width = images.front().width;
  mean.height = images.front().height;
  mean.values.assign(images.front().values.size(), 0.0);
  for (const auto& img : images) {
    for (std::size_t i = 0; i < img.values.size(); ++i) mean.values[i] += img.values[i];
  }
  for (double& v : mean.values) v /= static_cast<double>(images.size());
  return mean;
}

/// One row per image: image - mean (or mean - image).
inline Eigen::MatrixXd center_images(std::span<const ImageVector> images, const ImageVector& mean,
                                     Centering centering = Centering::image_minus_mean) {
  detail::require_same_shape(images, mean.width, mean.height);
  const auto d = static_cast<Eigen::Index>(mean.values.size());
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(images.size()), d);
  const auto m = detail::as_vector(mean);
  for (std::size_t i = 0; i < images.size(); ++i) {
    const auto x = detail::as_vector(images[i]);
    if (centering == Centering::image_minus_mean) {
      rows.row(static_cast<Eigen::Index>(i)) = (x - m).transpose();
    } else {
      rows.row(static_cast<Eigen::Index>(i)) = (m - x).transpose();
    }
  }
  return rows;
}

/// Fits the eigenspace, keeping min(k, rank) components.
inline EigenModel fit_eigenmodel(std::span<const ImageVector> images, std::size_t k = kDefaultComponents,
                                 Centering centering = Centering::image_minus_mean) {
  if (k < 1) fail(ErrorCategory::usage, "fit_eigenmodel: k must be at least 1");
  if (images.size() < 2) {
    fail(ErrorCategory::data, "fit_eigenmodel: need at least 2 training images, got " +
                                  std::to_string(images.size()));
  }
  const ImageVector mean = mean_image(images);
  const Eigen::MatrixXd centered = center_images(images, mean, centering);
  if (centered.size() == 0 || centered.cwiseAbs().maxCoeff() <= 1e-12) {
    fail(ErrorCategory::numeric, "fit_eigenmodel: zero variance (all training images identical)");
  }

  const Eigen::MatrixXd gram = centered * centered.transpose();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success) {
    fail(ErrorCategory::numeric, "fit_eigenmodel: eigendecomposition did not converge");
  }
  const Eigen::VectorXd& lambda = solver.eigenvalues();  // ascending
  const Eigen::Index n = lambda.size();
  const double largest = lambda(n - 1);
  if (!(largest > 0.0)) fail(ErrorCategory::numeric, "fit_eigenmodel: zero variance");

  Eigen::Index rank = 0;
  while (rank < n && lambda(n - 1 - rank) > largest * 1e-12) ++rank;
  const Eigen::Index kept = std::min<Eigen::Index>(static_cast<Eigen::Index>(k), rank);

  EigenModel model;
  model.width = mean.width;
  model.height = mean.height;
  model.mean = detail::as_vector(mean);
  model.requested_k = k;
  model.centering = centering;
  model.eigenvectors.resize(centered.cols(), kept);
  model.eigenvalues.resize(kept);
  for (Eigen::Index j = 0; j < kept; ++j) {
    const Eigen::Index src = n - 1 - j;
    Eigen::VectorXd u = centered.transpose() * solver.eigenvectors().col(src);
    u /= u.norm();
    Eigen::Index at = 0;
    u.cwiseAbs().maxCoeff(&at);
    if (u(at) < 0.0) u = -u;
    model.eigenvectors.col(j) = u;
    model.eigenvalues(j) = lambda(src) / static_cast<double>(images.size() - 1);
  }
  return model;
}

inline EigenCoords project(const EigenModel& model, const ImageVector& image) {
  detail::require_model_shape(model, image);
  const auto x = detail::as_vector(image);
  const Eigen::VectorXd offset =
      model.centering == Centering::image_minus_mean ? Eigen::VectorXd(x - model.mean) : Eigen::VectorXd(model.mean - x);
  const Eigen::VectorXd c = model.eigenvectors.transpose() * offset;
  return EigenCoords{std::vector<double>(c.data(), c.data() + c.size())};
}

/// Unclamped reconstruction; values may leave [0,1] (write_pgm clamps on export).
inline ImageVector reconstruct(const EigenModel& model, const EigenCoords& coords) {
  if (coords.size() != model.k()) {
    fail(ErrorCategory::data, "reconstruct: expected " + std::to_string(model.k()) + " coordinates, got " +
                                  std::to_string(coords.size()));
  }
  const Eigen::Map<const Eigen::VectorXd> c(coords.values.data(), static_cast<Eigen::Index>(coords.size()));
  Eigen::VectorXd offset = model.eigenvectors * c;
  const Eigen::VectorXd x = model.centering == Centering::image_minus_mean ? Eigen::VectorXd(model.mean + offset)
                                                                           : Eigen::VectorXd(model.mean - offset);
  ImageVector img;
  img.width = model.width;
  img.height = model.height;
  img.values.assign(x.data(), x.data() + x.size());
  return img;
}

inline double eigen_distance(const EigenCoords& a, const EigenCoords& b) {
  if (a.size() != b.size()) {
    fail(ErrorCategory::data, "eigen_distance: coordinate lengths differ (" + std::to_string(a.size()) + " vs " +
                                  std::to_string(b.size()) + ")");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a.values[i] - b.values[i];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

// ---- serialization --------------------------------------------------------

inline nlohmann::ordered_json model_to_json(const EigenModel& model) {
  nlohmann::ordered_json j;
  j["width"] = model.width;
  j["height"] = model.height;
  j["k"] = model.k();
  j["requested_k"] = model.requested_k;
  j["centering"] = model.centering == Centering::image_minus_mean ? "image_minus_mean" : "mean_minus_image";
  j["mean"] = std::vector<double>(model.mean.data(), model.mean.data() + model.mean.size());
  j["eigenvalues"] = std::vector<double>(model.eigenvalues.data(), model.eigenvalues.data() + model.eigenvalues.size());
  auto vectors = nlohmann::ordered_json::array();
  for (Eigen::Index c = 0; c < model.eigenvectors.cols(); ++c) {
    const Eigen::VectorXd col = model.eigenvectors.col(c);
    vectors.push_back(std::vector<double>(col.data(), col.data() + col.size()));
  }
  j["eigenvectors"] = std::move(vectors);
  return j;
}

template <typename Json>
EigenModel model_from_json(const Json& j) {
  const auto bad = [](const std::string& what) { fail(ErrorCategory::data, "model: " + what); };
  if (!j.is_object()) bad("expected a JSON object");
  for (const char* key : {"width", "height", "k", "mean", "eigenvalues", "eigenvectors"}) {
    if (!j.contains(key)) bad(std::string("missing field '") + key + "'");
  }
  EigenModel model;
  try {
    model.width = j.at("width").template get<std::size_t>();
    model.height = j.at("height").template get<std::size_t>();
    const auto k = j.at("k").template get<std::size_t>();
    model.requested_k = j.contains("requested_k") ? j.at("requested_k").template get<std::size_t>() : k;
    if (j.contains("centering")) {
      const auto c = j.at("centering").template get<std::string>();
      if (c == "image_minus_mean") {
        model.centering = Centering::image_minus_mean;
      } else if (c == "mean_minus_image") {
        model.centering = Centering::mean_minus_image;
      } else {
        bad("unknown centering '" + c + "'");
      }
    }
    const auto mean = j.at("mean").template get<std::vector<double>>();
    const auto values = j.at("eigenvalues").template get<std::vector<double>>();
    const auto vectors = j.at("eigenvectors").template get<std::vector<std::vector<double>>>();
    const std::size_t d = model.width * model.height;
    if (d == 0) bad("zero image dimension");
    if (mean.size() != d) bad("mean has " + std::to_string(mean.size()) + " values, expected " + std::to_string(d));
    if (values.size() != k || vectors.size() != k) {
      bad("k = " + std::to_string(k) + " but found " + std::to_string(values.size()) + " eigenvalues and " +
          std::to_string(vectors.size()) + " eigenvectors");
    }
    model.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(d));
    model.eigenvalues = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(k));
    model.eigenvectors.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(k));
    for (std::size_t c = 0; c < k; ++c) {
      if (vectors[c].size() != d) bad("eigenvector " + std::to_string(c) + " has wrong length");
      model.eigenvectors.col(static_cast<Eigen::Index>(c)) =
          Eigen::Map<const Eigen::VectorXd>(vectors[c].data(), static_cast<Eigen::Index>(d));
    }
  } catch (const nlohmann::json::exception& e) {
    bad(e.what());
  }
  return model;
}

}  // namespace dtpca
