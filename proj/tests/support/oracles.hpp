#pragma once

// Definition-level reference computations shared by unit and acceptance
// tests. Each takes a different numerical route from the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "latentkit/graphs.hpp"
#include "latentkit/stats.hpp"

namespace oracles {

using latentkit::Matrix;
using latentkit::Vector;

/// P(chi^2_df > x) by composite Simpson on the density after t = u^2,
/// which removes the t^(-1/2) singularity at zero for df = 1.
inline double simpson_chi2_sf(double x, double df, int intervals = 20000) {
  const double norm = std::pow(2.0, df / 2.0) * std::tgamma(df / 2.0);
  const auto f = [&](double u) { return 2.0 * std::pow(u, df - 1.0) * std::exp(-u * u / 2.0) / norm; };
  const double a = std::sqrt(x);
  const double b = a + 40.0;
  const double h = (b - a) / intervals;
  double s = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

struct OlsReference {
  Vector beta;
  Vector leverage;
  Matrix cov_hc3;
};

/// Normal equations, explicit hat matrix, sandwich with e^2 / (1 - h)^2.
inline OlsReference ols_reference(const Matrix& X, const Vector& y) {
  const Matrix xtx_inv = (X.transpose() * X).inverse();
  OlsReference r;
  r.beta = xtx_inv * X.transpose() * y;
  const Vector e = y - X * r.beta;
  const Matrix hat = X * xtx_inv * X.transpose();
  r.leverage = hat.diagonal();
  Matrix meat = Matrix::Zero(X.cols(), X.cols());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const double w = e(i) * e(i) / ((1.0 - r.leverage(i)) * (1.0 - r.leverage(i)));
    meat += w * X.row(i).transpose() * X.row(i);
  }
  r.cov_hc3 = xtx_inv * meat * xtx_inv;
  return r;
}

/// Heteroskedastic regression with a treatment column and two factors.
inline latentkit::DesignMatrix random_design(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<int> treated(static_cast<std::size_t>(n));
  latentkit::Factor f1{"family", {}};
  latentkit::Factor f2{"dataset", {}};
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int t = static_cast<int>(i % 2);
    const int a = static_cast<int>((i / 2) % 3);
    const int b = static_cast<int>(rng() % 4);
    treated[static_cast<std::size_t>(i)] = t;
    f1.values.push_back("fam" + std::to_string(a));
    f2.values.push_back("ds" + std::to_string(b));
    y(i) = 0.7 * t + 0.3 * a - 0.2 * b + (0.5 + 0.5 * a) * nd(rng);
  }
  return latentkit::treatment_design(y, treated, {f1, f2});
}

struct PlantedEffect {
  latentkit::DesignMatrix design;
  std::vector<double> control_values;
  double planted_shift = 0.0;
  double control_population_sd = 0.0;
};

/// n/2 control and n/2 treated rows over three datasets with small fixed
/// effects; the treated arm is shifted by exactly one population control sd.
inline PlantedEffect planted_effect(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  const double mu[3] = {-0.2, 0.0, 0.2};
  PlantedEffect out;
  out.control_population_sd = std::sqrt(1.0 + (0.04 + 0.0 + 0.04) / 3.0);
  out.planted_shift = out.control_population_sd;
  std::vector<int> treated;
  latentkit::Factor ds{"dataset", {}};
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int t = static_cast<int>(i % 2);
    const int d = static_cast<int>((i / 2) % 3);
    treated.push_back(t);
    ds.values.push_back("d" + std::to_string(d));
    y(i) = mu[d] + nd(rng) + (t ? out.planted_shift : 0.0);
    if (!t) out.control_values.push_back(y(i));
  }
  out.design = latentkit::treatment_design(y, treated, {ds});
  return out;
}

// Definition-level oracle: explicit loops for moments, covariance
// eigenvalues instead of singular values.
struct GeometryReference {
  double spread, mean_dist, std_dist, density, evr1, evr3, isotropy, entropy, erank;
  int k90;
};

inline GeometryReference geometry_reference(const Matrix& x) {
  const auto n = x.rows();
  const auto d = x.cols();
  Vector mu = Vector::Zero(d);
  for (Eigen::Index i = 0; i < n; ++i) mu += x.row(i).transpose();
  mu /= static_cast<double>(n);
  Matrix cov = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector c = x.row(i).transpose() - mu;
    cov += c * c.transpose();
  }
  cov /= static_cast<double>(n - 1);

  GeometryReference o{};
  o.spread = cov.trace();
  double s1 = 0, s2 = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = (x.row(i).transpose() - mu).norm();
    s1 += r;
    s2 += r * r;
  }
  o.mean_dist = s1 / static_cast<double>(n);
  o.std_dist = std::sqrt(s2 / static_cast<double>(n) - o.mean_dist * o.mean_dist);
  o.density = static_cast<double>(n) / o.spread;
  o.isotropy = cov.diagonal().minCoeff() / cov.diagonal().maxCoeff();

  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  Vector lam = eig.eigenvalues().reverse().cwiseMax(0.0);
  const double tot = lam.sum();
  o.evr1 = lam(0) / tot;
  o.evr3 = 0;
  for (Eigen::Index i = 0; i < std::min<Eigen::Index>(3, d); ++i) o.evr3 += lam(i) / tot;
  double cum = 0;
  o.k90 = static_cast<int>(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    cum += lam(i);
    if (cum / tot >= 0.9) {
      o.k90 = static_cast<int>(i + 1);
      break;
    }
  }
  const Vector sv = lam.cwiseSqrt();
  const double ssum = sv.sum();
  o.entropy = 0;
  for (Eigen::Index i = 0; i < d; ++i) {
    const double p = sv(i) / ssum;
    if (p > 1e-300) o.entropy -= p * std::log(p);
  }
  o.erank = std::exp(o.entropy);
  return o;
}

// All-pairs distances by Floyd-Warshall; -1 when unreachable.
inline std::vector<std::vector<int>> floyd_warshall(const latentkit::LatentGraph& g) {
  const int inf = 1 << 20;
  std::vector<std::vector<int>> d(static_cast<std::size_t>(g.n), std::vector<int>(static_cast<std::size_t>(g.n), inf));
  for (int v = 0; v < g.n; ++v) {
    d[v][v] = 0;
    for (int u : g.adj[static_cast<std::size_t>(v)]) d[v][u] = 1;
  }
  for (int k = 0; k < g.n; ++k) {
    for (int i = 0; i < g.n; ++i) {
      for (int j = 0; j < g.n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    }
  }
  for (auto& row : d) {
    for (auto& x : row) x = x >= inf ? -1 : x;
  }
  return d;
}

}  // namespace oracles
