#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rise/matrix.hpp"

namespace rise {

struct KMeansOptions {
  std::size_t max_iters = 100;
  double tol = 1e-6;          ///< on the largest center displacement
  std::size_t restarts = 1;   ///< independent k-means++ starts; lowest inertia wins
};

struct KMeansResult {
  Matrix centers;                        ///< m x d
  std::vector<std::size_t> assignments;  ///< length n, ids in [0, m)
  double inertia = 0.0;
  std::size_t iterations = 0;
  /// Inertia of each assignment step against the centers it was made for,
  /// for the winning restart. Non-increasing.
  std::vector<double> inertia_trace;
};

/// Lloyd's algorithm with k-means++ seeding. Distance ties go to the lowest
/// center index. A cluster left empty by an assignment step takes the point
/// farthest from its own center.
KMeansResult kmeans(const Matrix& points, std::size_t m, std::uint64_t seed,
                    const KMeansOptions& options = {});

enum class AnchorStrategy { kmeans, random };

/// m anchors for one view: k-means centers, or m distinct rows drawn uniformly.
Matrix select_anchors(const Matrix& view, AnchorStrategy strategy, std::size_t m,
                      std::uint64_t seed);

}  // namespace rise
