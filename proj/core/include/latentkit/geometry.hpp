#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "latentkit/linalg.hpp"
#include "latentkit/table.hpp"

namespace latentkit {

/// Scale and shape descriptors of one point cloud. Values that are
/// undefined for a zero-variance cloud are nullopt.
struct GeometryReport {
  Eigen::Index n = 0;
  Eigen::Index d = 0;
  double total_spread = 0.0;
  double mean_dist_centroid = 0.0;
  double std_dist_centroid = 0.0;
  std::optional<double> density;
  std::optional<int> k90;
  std::optional<double> evr1;
  std::optional<double> evr3;
  std::optional<double> isotropy;
  std::optional<double> spectral_entropy;  // natural log
  std::optional<double> effective_rank;

  /// The ten metrics as (name, value) in a fixed order.
  std::vector<std::pair<std::string, std::optional<double>>> rows() const;
};

/// Throws DegenerateInput (n < 2), NonFiniteInput.
GeometryReport geometry_metrics(const Matrix& x);

enum class BasisKind { Pca, LaplacianEigenmap };

struct Basis {
  BasisKind kind = BasisKind::Pca;
  /// PCA: d x m loadings. Eigenmaps: n x m vertex functions.
  Matrix V;
  Vector values;  // PCA descending variances; eigenmaps ascending eigenvalues
  Vector mean;    // PCA only
  int n_components = 1;  // eigenmaps: connected components of the kNN graph
  int k_neighbors = 0;
};

/// Top-m covariance eigenvectors; each column's largest-magnitude entry is
/// positive. Throws MOutOfRange unless 1 <= m <= min(n-1, d).
Basis pca_basis(const Matrix& x, int m);

/// Eigenvectors of the symmetric normalized Laplacian of the union kNN graph
/// for eigenvalues 1..m (0-based, ascending; the first is skipped). Dense
/// eigensolver, so callers subsample large clouds. Throws TooFewPoints,
/// MOutOfRange.
Basis laplacian_eigenmaps(const Matrix& x, int k_neighbors, int m);

/// Pearson correlation between basis i of A and basis j of B. PCA bases are
/// compared through each cloud's projection coefficients over the paired
/// rows; eigenmaps are correlated entry-wise. Throws IdMismatch,
/// DimensionMismatch, ZeroVarianceCoefficient.
Matrix basis_cross_correlation(const Basis& a, const Basis& b, const PairedClouds& pair);

}  // namespace latentkit
