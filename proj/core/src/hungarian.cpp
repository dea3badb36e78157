#include "latentkit/hungarian.hpp"

#include <limits>

namespace latentkit {

Assignment solve_assignment(const Matrix& cost) {
  linalg::require_finite(cost, "assignment cost matrix");
  const Eigen::Index rows = cost.rows();
  const Eigen::Index cols = cost.cols();
  const Eigen::Index n = std::max(rows, cols);
  Assignment out;
  out.col_for_row.assign(static_cast<std::size_t>(rows), -1);
  if (n == 0) return out;

  Matrix a = Matrix::Zero(n, n);
  a.topLeftCorner(rows, cols) = cost;

  // 1-based potentials u (rows), v (cols); p[j] is the row matched to column j.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const auto sz = static_cast<std::size_t>(n + 1);
  std::vector<double> u(sz, 0.0), v(sz, 0.0);
  std::vector<Eigen::Index> p(sz, 0), way(sz, 0);
  for (Eigen::Index i = 1; i <= n; ++i) {
    p[0] = i;
    Eigen::Index j0 = 0;
    std::vector<double> minv(sz, kInf);
    std::vector<char> used(sz, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const Eigen::Index i0 = p[static_cast<std::size_t>(j0)];
      double delta = kInf;
      Eigen::Index j1 = 0;
      for (Eigen::Index j = 1; j <= n; ++j) {
        const auto js = static_cast<std::size_t>(j);
        if (used[js]) continue;
        const double cur = a(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[js];
        if (cur < minv[js]) {
          minv[js] = cur;
          way[js] = j0;
        }
        if (minv[js] < delta) {
          delta = minv[js];
          j1 = j;
        }
      }
      for (Eigen::Index j = 0; j <= n; ++j) {
        const auto js = static_cast<std::size_t>(j);
        if (used[js]) {
          u[static_cast<std::size_t>(p[js])] += delta;
          v[js] -= delta;
        } else {
          minv[js] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const Eigen::Index j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  for (Eigen::Index j = 1; j <= n; ++j) {
    const Eigen::Index i = p[static_cast<std::size_t>(j)] - 1;
    if (i < rows && j - 1 < cols) {
      out.col_for_row[static_cast<std::size_t>(i)] = static_cast<int>(j - 1);
      out.total_cost += cost(i, j - 1);
    }
  }
  return out;
}

}  // namespace latentkit
