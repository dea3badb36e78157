#include "latentkit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "latentkit/error.hpp"
#include "latentkit/graphs.hpp"

namespace latentkit {
namespace {

Matrix coefficients(const Basis& basis, const Matrix& x) {
  if (basis.kind == BasisKind::LaplacianEigenmap) {
    if (basis.V.rows() != x.rows()) {
      fail(ErrorCode::IdMismatch, "eigenmap vertex count differs from paired rows");
    }
    return basis.V;
  }
  if (basis.V.rows() != x.cols()) {
    fail(ErrorCode::DimensionMismatch, "PCA basis dimension differs from the cloud's");
  }
  return linalg::centered(x, basis.mean) * basis.V;
}

Matrix standardized_columns(const Matrix& c) {
  Matrix z = c.rowwise() - c.colwise().mean();
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    const double norm = z.col(j).norm();
    if (!(norm > 0.0)) {
      fail(ErrorCode::ZeroVarianceCoefficient, "basis " + std::to_string(j) + " has constant coefficients");
    }
    z.col(j) /= norm;
  }
  return z;
}

}  // namespace

GeometryReport geometry_metrics(const Matrix& x) {
  if (x.rows() < 2) fail(ErrorCode::DegenerateInput, "geometry metrics need at least two rows");
  linalg::require_finite(x, "geometry input");
  GeometryReport r;
  r.n = x.rows();
  r.d = x.cols();
  const double denom = static_cast<double>(r.n - 1);
  const Matrix xc = linalg::centered(x, linalg::column_mean(x));

  const Vector var = xc.colwise().squaredNorm().transpose() / denom;
  r.total_spread = var.sum();

  const Vector dist = xc.rowwise().norm();
  r.mean_dist_centroid = dist.mean();
  const double mean_sq = dist.squaredNorm() / static_cast<double>(r.n);
  r.std_dist_centroid = std::sqrt(std::max(0.0, mean_sq - r.mean_dist_centroid * r.mean_dist_centroid));

  if (!(r.total_spread > 0.0)) return r;

  r.density = static_cast<double>(r.n) / r.total_spread;
  r.isotropy = var.minCoeff() / var.maxCoeff();

  Eigen::BDCSVD<Matrix> svd(xc);
  const Vector& sigma = svd.singularValues();  // descending
  const Vector lambda = sigma.array().square() / denom;
  const double lambda_sum = lambda.sum();
  r.evr1 = lambda(0) / lambda_sum;
  r.evr3 = lambda.head(std::min<Eigen::Index>(3, lambda.size())).sum() / lambda_sum;
  double cum = 0.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    cum += lambda(i);
    if (cum / lambda_sum >= 0.9) {
      r.k90 = static_cast<int>(i + 1);
      break;
    }
  }
  if (!r.k90) r.k90 = static_cast<int>(lambda.size());

  const double sigma_sum = sigma.sum();
  double h = 0.0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    const double p = sigma(i) / sigma_sum;
    if (p > 0.0) h -= p * std::log(p);
  }
  r.spectral_entropy = h;
  r.effective_rank = std::exp(h);
  return r;
}

std::vector<std::pair<std::string, std::optional<double>>> GeometryReport::rows() const {
  const auto as_double = [](const std::optional<int>& v) -> std::optional<double> {
    return v ? std::optional<double>(*v) : std::nullopt;
  };
  return {{"total_spread", total_spread},
          {"mean_dist_centroid", mean_dist_centroid},
          {"std_dist_centroid", std_dist_centroid},
          {"density", density},
          {"k90", as_double(k90)},
          {"evr1", evr1},
          {"evr3", evr3},
          {"isotropy", isotropy},
          {"spectral_entropy", spectral_entropy},
          {"effective_rank", effective_rank}};
}

Basis pca_basis(const Matrix& x, int m) {
  const Eigen::Index hi = std::min(x.rows() - 1, x.cols());
  if (m < 1 || m > hi) {
    fail(ErrorCode::MOutOfRange, "m=" + std::to_string(m) + " outside [1, " + std::to_string(hi) + "]");
  }
  Basis b;
  b.kind = BasisKind::Pca;
  b.mean = linalg::column_mean(x);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(linalg::sample_covariance(x));
  if (eig.info() != Eigen::Success) fail(ErrorCode::NonFiniteInput, "covariance eigensolve failed");
  b.V = eig.eigenvectors().rightCols(m).rowwise().reverse();
  b.values = eig.eigenvalues().tail(m).reverse();
  linalg::normalize_column_signs(b.V);
  return b;
}

Basis laplacian_eigenmaps(const Matrix& x, int k_neighbors, int m) {
  const Eigen::Index n = x.rows();
  if (m < 1 || m > n - 1) {
    fail(ErrorCode::MOutOfRange, "m=" + std::to_string(m) + " outside [1, " + std::to_string(n - 1) + "]");
  }
  const LatentGraph g = knn_graph(x, k_neighbors);
  Basis b;
  b.kind = BasisKind::LaplacianEigenmap;
  b.k_neighbors = k_neighbors;
  connected_components(g, &b.n_components);

  Vector dinv(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    dinv(i) = 1.0 / std::sqrt(static_cast<double>(g.adj[static_cast<std::size_t>(i)].size()));
  }
  Matrix lap = Matrix::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int j : g.adj[static_cast<std::size_t>(i)]) lap(i, j) -= dinv(i) * dinv(j);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(lap);
  if (eig.info() != Eigen::Success) fail(ErrorCode::NonFiniteInput, "Laplacian eigensolve failed");
  b.V = eig.eigenvectors().middleCols(1, m);
  b.values = eig.eigenvalues().segment(1, m);
  linalg::normalize_column_signs(b.V);
  return b;
}

Matrix basis_cross_correlation(const Basis& a, const Basis& b, const PairedClouds& pair) {
  if (pair.A.ids != pair.B.ids) fail(ErrorCode::IdMismatch, "clouds are not id-aligned");
  const Matrix za = standardized_columns(coefficients(a, pair.A.X));
  const Matrix zb = standardized_columns(coefficients(b, pair.B.X));
  if (za.rows() != zb.rows()) fail(ErrorCode::IdMismatch, "coefficient series differ in length");
  Matrix c = za.transpose() * zb;
  return c.cwiseMax(-1.0).cwiseMin(1.0);
}

}  // namespace latentkit
