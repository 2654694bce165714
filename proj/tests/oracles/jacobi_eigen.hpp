#pragma once

// Test-only cyclic Jacobi eigensolver for small dense symmetric matrices,
// used as the direct covariance-decomposition oracle for the eigenface model.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

struct SymmetricEigen {
  std::vector<double> values;                // descending
  std::vector<std::vector<double>> vectors;  // vectors[j] pairs with values[j]
};

inline SymmetricEigen jacobi_eigen(Matrix a) {
  const std::size_t n = a.size();
  Matrix v(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        total += a[i][j] * a[i][j];
        if (i != j) off += a[i][j] * a[i][j];
      }
    if (off <= 1e-30 * total) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a[i][i] > a[j][j]; });
  SymmetricEigen out;
  for (std::size_t idx : order) {
    out.values.push_back(a[idx][idx]);
    std::vector<double> col(n);
    for (std::size_t k = 0; k < n; ++k) col[k] = v[k][idx];
    out.vectors.push_back(std::move(col));
  }
  return out;
}

/// Top-k principal projections of `images` (rows) via the d x d covariance.
inline Matrix covariance_projections(const Matrix& images, std::size_t k) {
  const std::size_t n = images.size(), d = images.front().size();
  std::vector<double> mean(d, 0.0);
  for (const auto& x : images)
    for (std::size_t i = 0; i < d; ++i) mean[i] += x[i] / static_cast<double>(n);
  Matrix centered = images;
  for (auto& x : centered)
    for (std::size_t i = 0; i < d; ++i) x[i] -= mean[i];
  Matrix cov(d, std::vector<double>(d, 0.0));
  for (const auto& x : centered)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) cov[i][j] += x[i] * x[j] / static_cast<double>(n - 1);
  const SymmetricEigen eig = jacobi_eigen(cov);
  Matrix coords(n, std::vector<double>(k, 0.0));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t i = 0; i < d; ++i) coords[r][j] += eig.vectors[j][i] * centered[r][i];
  return coords;
}

inline double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace oracle
