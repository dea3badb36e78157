#pragma once

#include <vector>

#include "latentkit/linalg.hpp"

namespace latentkit {

struct Assignment {
  /// col_for_row[i] is the column assigned to row i, or -1 when the row was
  /// matched to padding (more rows than columns).
  std::vector<int> col_for_row;
  double total_cost = 0.0;
};

/// Minimum-cost assignment, O(n^3) shortest augmenting paths with
/// potentials. Rectangular inputs are zero-padded to square. Throws
/// NonFiniteInput.
Assignment solve_assignment(const Matrix& cost);

}  // namespace latentkit
