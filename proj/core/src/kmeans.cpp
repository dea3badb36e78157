#include "latentkit/kmeans.hpp"

#include <limits>
#include <random>
#include <string>

#include "latentkit/error.hpp"

namespace latentkit {
namespace {

double sq_dist(const Matrix& a, Eigen::Index i, const Matrix& b, Eigen::Index j) {
  return (a.row(i) - b.row(j)).squaredNorm();
}

Matrix plus_plus_init(const Matrix& x, int k, std::mt19937_64& rng) {
  const Eigen::Index n = x.rows();
  Matrix centers(k, x.cols());
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  centers.row(0) = x.row(first(rng));
  Vector d2(n);
  for (Eigen::Index i = 0; i < n; ++i) d2(i) = sq_dist(x, i, centers, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double target = unit(rng) * total;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        target -= d2(i);
        if (target < 0.0 && d2(i) > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = first(rng);
    }
    centers.row(c) = x.row(pick);
    for (Eigen::Index i = 0; i < n; ++i) d2(i) = std::min(d2(i), sq_dist(x, i, centers, c));
  }
  return centers;
}

}  // namespace

KMeansResult kmeans(const Matrix& x, int k, std::uint64_t seed, int max_iter) {
  const Eigen::Index n = x.rows();
  if (k < 1) fail(ErrorCode::InvalidArgument, "k-means needs k >= 1");
  if (k > n) {
    fail(ErrorCode::TooFewSamples,
         "k-means with k=" + std::to_string(k) + " on " + std::to_string(n) + " points");
  }
  std::mt19937_64 rng(seed);
  KMeansResult r;
  r.centers = plus_plus_init(x, k, rng);
  r.assignment.assign(static_cast<std::size_t>(n), -1);
  Vector best(n);

  for (int it = 0; it < max_iter; ++it) {
    r.iterations = it + 1;
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int arg = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = sq_dist(x, i, r.centers, c);
        if (d < bd) {
          bd = d;
          arg = c;
        }
      }
      best(i) = bd;
      if (r.assignment[static_cast<std::size_t>(i)] != arg) {
        r.assignment[static_cast<std::size_t>(i)] = arg;
        changed = true;
      }
    }

    Matrix sums = Matrix::Zero(k, x.cols());
    std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int c = r.assignment[static_cast<std::size_t>(i)];
      sums.row(c) += x.row(i);
      ++counts[static_cast<std::size_t>(c)];
    }
    bool reseeded = false;
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        r.centers.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
        continue;
      }
      Eigen::Index far = 0;
      best.maxCoeff(&far);
      r.centers.row(c) = x.row(far);
      best(far) = 0.0;
      reseeded = true;
    }
    if (!changed && !reseeded) break;
  }

  r.inertia = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    r.inertia += sq_dist(x, i, r.centers, r.assignment[static_cast<std::size_t>(i)]);
  }
  return r;
}

}  // namespace latentkit
