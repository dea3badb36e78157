#pragma once

// Seeded synthetic data shared by the unit and acceptance tests.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "latentkit/table.hpp"

namespace fixtures {

using latentkit::Matrix;
using latentkit::Vector;

inline Matrix gaussian(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Matrix x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = nd(rng);
  }
  return x;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

/// Haar-ish random orthogonal matrix from the QR of a Gaussian matrix.
inline Matrix orthogonal(Eigen::Index d, std::uint64_t seed) {
  Eigen::HouseholderQR<Matrix> qr(gaussian(d, d, seed));
  Matrix q = qr.householderQ();
  const Vector diag = qr.matrixQR().diagonal();
  for (Eigen::Index j = 0; j < d; ++j) {
    if (diag(j) < 0) q.col(j) *= -1.0;
  }
  return q;
}

/// Anisotropic cloud: Gaussian rows scaled per column and mixed by a random
/// rotation, plus an offset.
inline Matrix correlated(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  Matrix z = gaussian(n, d, seed);
  for (Eigen::Index j = 0; j < d; ++j) z.col(j) *= 0.5 + 2.0 * static_cast<double>(j + 1) / static_cast<double>(d);
  Matrix x = z * orthogonal(d, seed ^ 0xabcdefULL).transpose();
  x.rowwise() += Vector::LinSpaced(d, -1.0, 3.0).transpose();
  return x;
}

/// Classes separated along a few latent directions; labels in [0, classes).
struct Labeled {
  Matrix X;
  std::vector<std::int64_t> y;
};

/// Centers depend on `seed` only; `noise_seed` (default: seed) draws a fresh
/// sample around the same centers.
inline Labeled blobs(Eigen::Index n, Eigen::Index d, int classes, double spread, std::uint64_t seed,
                     std::optional<std::uint64_t> noise_seed = std::nullopt) {
  const Matrix centers = 4.0 * gaussian(classes, d, seed ^ 0x5eedULL);
  Labeled out{gaussian(n, d, noise_seed.value_or(seed) ^ 0x77ULL) * spread, {}};
  for (Eigen::Index i = 0; i < n; ++i) {
    const int c = static_cast<int>(i % classes);
    out.X.row(i) += centers.row(c);
    out.y.push_back(c);
  }
  return out;
}

inline latentkit::PairedClouds paired(const Matrix& a, const Matrix& b,
                                      const std::vector<std::int64_t>& y = {}) {
  return {latentkit::PointCloud::from_matrix(a, y, "a"), latentkit::PointCloud::from_matrix(b, y, "b")};
}

/// Closed-form contents of the tests/data embedding fixtures.
namespace data {
inline constexpr int kRows = 37;
inline constexpr int kDim = 6;
inline constexpr const char* kModel = "vit_small_patch16_224.augreg_in21k";
inline std::uint32_t id(int sorted_row) { return static_cast<std::uint32_t>(100 + sorted_row); }
inline float value(std::uint32_t id, int j) {
  const double base = ((static_cast<int>(id) * 7 + j * 3) % 11 - 5) * 0.25;
  return static_cast<float>(base + static_cast<double>(id) / 3.0);
}
inline std::int64_t label(std::uint32_t id) { return (id * 5) % 4; }
inline std::int64_t fine(std::uint32_t id) { return id % 7; }
}  // namespace data

}  // namespace fixtures
