#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "latentkit/align.hpp"
#include "latentkit/error.hpp"
#include "latentkit/eval.hpp"

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

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

// Least squares in whitened coordinates by normal equations, row convention:
// B~ = A~ M. Independent of the SVD/pinv route used by fit_linear.
Matrix oracle_linear(const AlignmentMap& m, const PairedClouds& p) {
  const Matrix a = prewhiten(*m.whiten_a, p.A.X);
  const Matrix b = prewhiten(*m.whiten_b, p.B.X);
  return (a.transpose() * a).ldlt().solve(a.transpose() * b);
}

}  // namespace

// ---------------------------------------------------------------- linear

TEST(Linear, IdentityPairGivesIdentityMap) {
  const Matrix x = fixtures::correlated(200, 6, 1);
  const auto p = fixtures::paired(x, x);
  const auto m = fit_linear(p);
  EXPECT_EQ(m.k, 6);
  EXPECT_LT(max_abs(m.right_operator() - Matrix::Identity(6, 6)), 1e-9);
  EXPECT_LT(reconstruction_mse(transmit(m, x), x), 1e-18 * x.squaredNorm());
}

TEST(Linear, OrthogonalRelationRecoversRotation) {
  const Matrix a = fixtures::gaussian(400, 5, 2);
  const Matrix r = fixtures::orthogonal(5, 3);
  const auto p = fixtures::paired(a, a * r);
  const auto m = fit_linear(p);
  const Matrix a_w = prewhiten(*m.whiten_a, a);
  const Matrix b_w = prewhiten(*m.whiten_b, a * r);
  EXPECT_LT((a_w * m.right_operator() - b_w).squaredNorm() / (400.0 * 5.0), 1e-8);
}

TEST(Linear, MatchesNormalEquationOracle) {
  const Matrix a = fixtures::correlated(500, 8, 4);
  const Matrix b = a * fixtures::gaussian(8, 6, 5) + 0.3 * fixtures::gaussian(500, 6, 6);
  const auto p = fixtures::paired(a, b);
  const auto m = fit_linear(p);
  EXPECT_EQ(m.k, 6);
  EXPECT_LT(max_abs(m.right_operator() - oracle_linear(m, p)), 1e-9);
}

TEST(Linear, TruncationFollowsEckartYoung) {
  const Matrix a = fixtures::correlated(500, 8, 7);
  const Matrix b = a * fixtures::gaussian(8, 6, 8) + 0.3 * fixtures::gaussian(500, 6, 9);
  const auto p = fixtures::paired(a, b);
  const auto full = fit_linear(p);
  const Matrix op = oracle_linear(full, p);
  Eigen::JacobiSVD<Matrix> svd(op);
  const Vector s = svd.singularValues();
  double prev_err = std::numeric_limits<double>::infinity();
  double prev_mse = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 6; ++k) {
    const auto mk = truncate_linear(full, k);
    const double err = (mk.right_operator() - op).norm();
    const double tail = std::sqrt(s.tail(6 - k).squaredNorm());
    EXPECT_NEAR(err, tail, 1e-9) << "k=" << k;
    EXPECT_LE(err, prev_err + 1e-12);
    const double mse = reconstruction_mse(transmit(mk, a), b);
    EXPECT_LE(mse, prev_mse + 1e-9) << "k=" << k;
    prev_err = err;
    prev_mse = mse;
  }
  EXPECT_EQ(code_of([&] { truncate_linear(full, 0); }), ErrorCode::KOutOfRange);
  EXPECT_EQ(code_of([&] { truncate_linear(full, 7); }), ErrorCode::KOutOfRange);
}

TEST(Linear, AffineRelationIsExactAtFullRank) {
  const Matrix a = fixtures::correlated(300, 7, 10);
  Matrix b = a * fixtures::gaussian(7, 7, 11);
  b.rowwise() += Vector::LinSpaced(7, 5.0, -5.0).transpose();
  const auto m = fit_linear(fixtures::paired(a, b));
  EXPECT_LT(reconstruction_mse(transmit(m, a), b), 1e-10 * b.squaredNorm() / 300.0);
}

// ---------------------------------------------------------------- ppfe

TEST(Ppfe, FramesAreParseval) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto data = fixtures::blobs(900, 10, 5, 1.0, seed);
    const Matrix b = data.X * fixtures::gaussian(10, 8, seed + 100);
    PpfeOptions opts;
    opts.seed = seed;
    for (int kappa : {1, 3, 6}) {
      const auto m = fit_ppfe(fixtures::paired(data.X, b), kappa, opts);
      const auto& op = std::get<PpfeOperator>(m.op);
      EXPECT_EQ(op.F_T.cols(), kappa);
      EXPECT_LT(max_abs(op.F_T.transpose() * op.F_T - Matrix::Identity(kappa, kappa)), 1e-6);
      EXPECT_LT(max_abs(op.F_R.transpose() * op.F_R - Matrix::Identity(kappa, kappa)), 1e-6);
      ASSERT_EQ(op.anchors.size(), static_cast<std::size_t>(kappa));
      for (const auto& set : op.anchors) EXPECT_EQ(set.size(), 32u);
    }
  }
}

TEST(Ppfe, IdenticalCloudsGiveOrthogonalProjector) {
  const auto data = fixtures::blobs(500, 6, 4, 1.0, 21);
  PpfeOptions opts;
  opts.seed = 5;
  const auto m = fit_ppfe(fixtures::paired(data.X, data.X), 3, opts);
  const Matrix op = m.right_operator();
  EXPECT_LT(max_abs(op - op.transpose()), 1e-9);
  EXPECT_LT(max_abs(op * op - op), 1e-9);
  EXPECT_NEAR(op.trace(), 3.0, 1e-9);

  // Transmitted rows lie in the span of B's frame: the residual after an
  // explicit least-squares projection onto span(F_R) vanishes.
  const auto& fr = std::get<PpfeOperator>(m.op).F_R;
  const Matrix bt = prewhiten(*m.whiten_a, data.X) * op;
  const Matrix coef = (fr.transpose() * fr).ldlt().solve(fr.transpose() * bt.transpose());
  EXPECT_LT(max_abs(bt.transpose() - fr * coef), 1e-9);
}

TEST(Ppfe, RotatedTargetKeepsProbeAccuracy) {
  const auto data = fixtures::blobs(1200, 6, 3, 1.5, 31);
  const Matrix b = data.X * fixtures::orthogonal(6, 32);
  const auto train = fixtures::paired(data.X.topRows(900), b.topRows(900),
                                      {data.y.begin(), data.y.begin() + 900});
  const auto test = fixtures::paired(data.X.bottomRows(300), b.bottomRows(300),
                                     {data.y.begin() + 900, data.y.end()});
  PpfeOptions opts;
  opts.seed = 3;
  const auto m = fit_ppfe(train, 6, opts);
  const auto probe = fit_probe(train.B, "label");
  const double native = probe_metrics(probe, test.B, "label").accuracy;
  const double transmitted = evaluate_alignment(m, test, probe, "label").accuracy;
  EXPECT_NEAR(transmitted, native, 0.02);
}

TEST(Ppfe, Errors) {
  const auto data = fixtures::blobs(100, 4, 2, 1.0, 1);
  const auto p = fixtures::paired(data.X, data.X.leftCols(3));
  EXPECT_EQ(code_of([&] { fit_ppfe(p, 4); }), ErrorCode::KOutOfRange);
  PpfeOptions greedy;
  greedy.rho = 90;
  EXPECT_EQ(code_of([&] { fit_ppfe(p, 3, greedy); }), ErrorCode::TooFewSamples);

}

// ---------------------------------------------------------------- cca

// The epsilon ridge moves correlations by about eps / lambda_min, so the
// fixtures below keep every variance well above 1.
TEST(Cca, SelfPairIsPerfectlyCorrelated) {
  const Matrix x = 10.0 * fixtures::correlated(400, 5, 41);
  const auto m = fit_cca(fixtures::paired(x, x), 5);
  const auto& op = std::get<CcaOperator>(m.op);
  for (Eigen::Index i = 0; i < 5; ++i) EXPECT_NEAR(op.correlations(i), 1.0, 1e-6);
  EXPECT_LT(max_abs(transmit(m, x) - x), 1e-6);
}

TEST(Cca, IndependentCloudsHaveSmallCorrelation) {
  const auto m = fit_cca(fixtures::paired(fixtures::gaussian(2000, 4, 1), fixtures::gaussian(2000, 4, 2)), 4);
  const auto& rho = std::get<CcaOperator>(m.op).correlations;
  EXPECT_LT(rho(0), 0.3);
  for (Eigen::Index i = 0; i < rho.size(); ++i) {
    EXPECT_GE(rho(i), 0.0);
    EXPECT_LE(rho(i), 1.0 + 1e-9);
    if (i > 0) EXPECT_LE(rho(i), rho(i - 1));
  }
}

TEST(Cca, ScaleInvariant) {
  const Matrix a = 100.0 * fixtures::correlated(300, 6, 51);
  const Matrix b = a * fixtures::gaussian(6, 5, 52) + 50.0 * fixtures::gaussian(300, 5, 53);
  const auto m1 = fit_cca(fixtures::paired(a, b), 3);
  const auto m2 = fit_cca(fixtures::paired(7.5 * a, b), 3);
  const Matrix t1 = transmit(m1, a);
  const Matrix t2 = transmit(m2, 7.5 * a);
  EXPECT_LT((t1 - t2).norm() / t1.norm(), 1e-8);
}

TEST(Cca, TruncationMatchesFreshFit) {
  const Matrix a = fixtures::correlated(300, 6, 61);
  const Matrix b = a * fixtures::gaussian(6, 5, 62) + 0.5 * fixtures::gaussian(300, 5, 63);
  const auto p = fixtures::paired(a, b);
  const auto wide = fit_cca(p, 5);
  for (int k = 1; k <= 5; ++k) {
    EXPECT_LT(max_abs(transmit(truncate_cca(wide, k), a) - transmit(fit_cca(p, k), a)), 1e-9);
  }
  EXPECT_EQ(code_of([&] { fit_cca(p, 6); }), ErrorCode::KOutOfRange);
  EXPECT_EQ(code_of([&] { truncate_cca(wide, 0); }), ErrorCode::KOutOfRange);
}

// ---------------------------------------------------------------- maps

TEST(AlignmentMap, JsonRoundTripPreservesTransmission) {
  const auto data = fixtures::blobs(400, 6, 3, 1.0, 71);
  const Matrix b = data.X * fixtures::gaussian(6, 4, 72);
  const auto p = fixtures::paired(data.X, b);
  PpfeOptions opts;
  opts.seed = 9;
  for (const auto& m : {fit_ppfe(p, 3, opts), truncate_linear(fit_linear(p), 2), fit_cca(p, 3)}) {
    const auto back = AlignmentMap::from_json(nlohmann::json::parse(m.to_json().dump()));
    EXPECT_EQ(back.method, m.method);
    EXPECT_EQ(back.k, m.k);
    EXPECT_LT(max_abs(transmit(back, data.X) - transmit(m, data.X)), 1e-12);
  }
}

TEST(AlignmentMap, TransmitKeepsIdsAndChecksShape) {
  const Matrix a = fixtures::gaussian(50, 3, 1);
  const auto p = fixtures::paired(a, a * 2.0, std::vector<std::int64_t>(50, 1));
  const auto m = fit_linear(p);
  const auto out = transmit(m, p.A);
  EXPECT_EQ(out.ids, p.A.ids);
  EXPECT_EQ(out.label("label"), p.A.label("label"));
  EXPECT_EQ(code_of([&] { transmit(m, Matrix::Ones(2, 4)); }), ErrorCode::DimensionMismatch);
}
