#pragma once

#include <cstdint>
#include <vector>

#include "latentkit/linalg.hpp"

namespace latentkit {

struct KMeansResult {
  Matrix centers;               // k x d
  std::vector<int> assignment;  // length n, values in [0, k)
  double inertia = 0.0;
  int iterations = 0;
};

/// Lloyd's algorithm with k-means++ seeding. Deterministic for a given seed.
/// A cluster that empties during iteration is reseeded with the point
/// farthest from its current center. Throws TooFewSamples when k > n.
KMeansResult kmeans(const Matrix& x, int k, std::uint64_t seed, int max_iter = 300);

}  // namespace latentkit
