#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "fixtures.hpp"
#include "latentkit/error.hpp"
#include "latentkit/geometry.hpp"
#include "oracles.hpp"

using namespace latentkit;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::ConfigError;
}

void expect_matches_oracle(const Matrix& x, double tol) {
  const GeometryReport r = geometry_metrics(x);
  const auto o = oracles::geometry_reference(x);
  const auto rel = [tol](double got, double want) { EXPECT_NEAR(got, want, tol * std::max(1.0, std::abs(want))); };
  rel(r.total_spread, o.spread);
  rel(r.mean_dist_centroid, o.mean_dist);
  rel(r.std_dist_centroid, o.std_dist);
  rel(*r.density, o.density);
  rel(*r.evr1, o.evr1);
  rel(*r.evr3, o.evr3);
  rel(*r.isotropy, o.isotropy);
  rel(*r.spectral_entropy, o.entropy);
  rel(*r.effective_rank, o.erank);
  EXPECT_EQ(*r.k90, o.k90);
}

}  // namespace

TEST(Geometry, MatchesOracle) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto n = 30 + static_cast<Eigen::Index>(s) * 17;
    const auto d = 2 + static_cast<Eigen::Index>(s % 6) * 3;
    expect_matches_oracle(fixtures::correlated(n, d, 500 + s), 1e-9);
  }
}

TEST(Geometry, IsotropicSpectrum) {
  // Orthogonal columns of equal norm: every direction carries the same
  // variance, so entropy is log(d) and the effective rank is d.
  const Eigen::Index d = 5;
  Matrix h = Matrix::Zero(2 * d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    h(2 * j, j) = 1.0;
    h(2 * j + 1, j) = -1.0;
  }
  const GeometryReport r = geometry_metrics(h);
  EXPECT_NEAR(*r.effective_rank, 5.0, 1e-12);
  EXPECT_NEAR(*r.spectral_entropy, std::log(5.0), 1e-12);
  EXPECT_NEAR(*r.isotropy, 1.0, 1e-12);
  EXPECT_NEAR(*r.evr1, 0.2, 1e-12);
  EXPECT_EQ(*r.k90, 5);
}

TEST(Geometry, RankOneLine) {
  Matrix x(4, 3);
  for (int i = 0; i < 4; ++i) x.row(i) << i, 2 * i, 0;
  const GeometryReport r = geometry_metrics(x);
  EXPECT_NEAR(*r.evr1, 1.0, 1e-12);
  EXPECT_EQ(*r.k90, 1);
  EXPECT_NEAR(*r.effective_rank, 1.0, 1e-9);
  EXPECT_EQ(*r.isotropy, 0.0);
  // var(i) = 5/3 per unit direction, times |(1, 2, 0)|^2 = 5.
  EXPECT_NEAR(r.total_spread, 25.0 / 3.0, 1e-12);
}

TEST(Geometry, ZeroSpreadLeavesRatiosMissing) {
  const GeometryReport r = geometry_metrics(Matrix::Constant(6, 3, 2.5));
  EXPECT_EQ(r.total_spread, 0.0);
  EXPECT_EQ(r.mean_dist_centroid, 0.0);
  EXPECT_FALSE(r.density);
  EXPECT_FALSE(r.k90);
  EXPECT_FALSE(r.isotropy);
  EXPECT_FALSE(r.effective_rank);
  const auto rows = r.rows();
  ASSERT_EQ(rows.size(), 10u);
  EXPECT_EQ(rows[0].first, "total_spread");
  EXPECT_FALSE(rows[3].second);
}

TEST(Geometry, Errors) {
  EXPECT_EQ(code_of([] { geometry_metrics(Matrix::Ones(1, 3)); }), ErrorCode::DegenerateInput);
  Matrix bad = Matrix::Ones(3, 2);
  bad(1, 1) = INFINITY;
  EXPECT_EQ(code_of([&] { geometry_metrics(bad); }), ErrorCode::NonFiniteInput);
}

TEST(Geometry, TranslationInvariantAndScaleCovariant) {
  const Matrix x = fixtures::correlated(80, 4, 3);
  const GeometryReport a = geometry_metrics(x);
  Matrix y = 3.0 * x;
  y.rowwise() += RowVector::Constant(4, -7.0);
  const GeometryReport b = geometry_metrics(y);
  EXPECT_NEAR(b.total_spread, 9.0 * a.total_spread, 1e-9 * b.total_spread);
  EXPECT_NEAR(b.mean_dist_centroid, 3.0 * a.mean_dist_centroid, 1e-9);
  EXPECT_NEAR(*b.effective_rank, *a.effective_rank, 1e-10);
  EXPECT_NEAR(*b.isotropy, *a.isotropy, 1e-12);
}

TEST(Pca, OrthonormalDescendingSigned) {
  const Matrix x = fixtures::correlated(200, 6, 12);
  const Basis b = pca_basis(x, 4);
  ASSERT_EQ(b.V.rows(), 6);
  ASSERT_EQ(b.V.cols(), 4);
  EXPECT_LT((b.V.transpose() * b.V - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-12);
  for (Eigen::Index j = 1; j < 4; ++j) EXPECT_GE(b.values(j - 1), b.values(j));
  for (Eigen::Index j = 0; j < 4; ++j) {
    Eigen::Index arg = 0;
    b.V.col(j).cwiseAbs().maxCoeff(&arg);
    EXPECT_GT(b.V(arg, j), 0.0);
  }
  // Variance of the projection onto each loading equals its eigenvalue.
  const Matrix coef = (x.rowwise() - b.mean.transpose()) * b.V;
  for (Eigen::Index j = 0; j < 4; ++j) {
    EXPECT_NEAR(coef.col(j).squaredNorm() / 199.0, b.values(j), 1e-9 * b.values(j));
  }
  EXPECT_EQ(code_of([&] { pca_basis(x, 7); }), ErrorCode::MOutOfRange);
  EXPECT_EQ(code_of([&] { pca_basis(x, 0); }), ErrorCode::MOutOfRange);
}

TEST(Eigenmaps, SkipsTrivialMode) {
  const Matrix x = fixtures::gaussian(60, 3, 4);
  const Basis b = laplacian_eigenmaps(x, 6, 3);
  ASSERT_EQ(b.V.rows(), 60);
  ASSERT_EQ(b.V.cols(), 3);
  EXPECT_EQ(b.kind, BasisKind::LaplacianEigenmap);
  EXPECT_EQ(b.n_components, 1);
  EXPECT_GT(b.values(0), 1e-8);
  for (Eigen::Index j = 1; j < 3; ++j) EXPECT_GE(b.values(j), b.values(j - 1));
  EXPECT_LT((b.V.transpose() * b.V - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_EQ(code_of([&] { laplacian_eigenmaps(x, 6, 60); }), ErrorCode::MOutOfRange);
  EXPECT_EQ(code_of([&] { laplacian_eigenmaps(x.topRows(5), 6, 2); }), ErrorCode::TooFewPoints);
}

TEST(CrossCorrelation, AffineCopyIsIdentity) {
  const Matrix x = fixtures::correlated(150, 5, 8);
  Matrix y = 2.0 * x;
  y.rowwise() += RowVector::Constant(5, 1.5);
  const PairedClouds pair = fixtures::paired(x, y);
  const Matrix c = basis_cross_correlation(pca_basis(x, 3), pca_basis(y, 3), pair);
  EXPECT_LT((c - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-9);

  // Exact doubling keeps every kNN tie, so both graphs coincide.
  const Matrix z = 2.0 * x;
  const Matrix e = basis_cross_correlation(laplacian_eigenmaps(x, 8, 2), laplacian_eigenmaps(z, 8, 2),
                                           fixtures::paired(x, z));
  // Normalized-Laplacian modes are D-orthogonal, not uncorrelated, so only
  // the diagonal is exactly 1.
  EXPECT_NEAR(e(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(e(1, 1), 1.0, 1e-12);
  EXPECT_NEAR(e(0, 1), e(1, 0), 1e-12);
}

TEST(CrossCorrelation, BoundedAndChecked) {
  const Matrix x = fixtures::gaussian(100, 4, 1);
  const Matrix y = fixtures::gaussian(100, 6, 2);
  const PairedClouds pair = fixtures::paired(x, y);
  const Matrix c = basis_cross_correlation(pca_basis(x, 2), pca_basis(y, 3), pair);
  ASSERT_EQ(c.rows(), 2);
  ASSERT_EQ(c.cols(), 3);
  EXPECT_LE(c.cwiseAbs().maxCoeff(), 1.0);

  PairedClouds shuffled = pair;
  shuffled.B.ids[0] = 500;
  EXPECT_EQ(code_of([&] { basis_cross_correlation(pca_basis(x, 2), pca_basis(y, 2), shuffled); }),
            ErrorCode::IdMismatch);
  EXPECT_EQ(code_of([&] { basis_cross_correlation(pca_basis(y, 2), pca_basis(y, 2), pair); }),
            ErrorCode::DimensionMismatch);
}
