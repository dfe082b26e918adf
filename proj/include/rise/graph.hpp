#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "rise/matrix.hpp"

namespace rise {

struct GraphEntry {
  std::uint32_t anchor = 0;
  double weight = 0.0;
};

inline constexpr std::size_t kDefaultKnn = 5;
inline constexpr double kTieTolerance = 1e-12;
inline constexpr double kZeroDegree = 1e-12;

// Sparse n_i x m sample-anchor graph. Every row stores exactly knn entries
// (some weights may be zero); `degrees` holds the raw column sums.
class BipartiteGraph {
 public:
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t knn() const noexcept { return knn_; }
  bool normalized() const noexcept { return normalized_; }

  std::span<const GraphEntry> row(std::size_t p) const {
    return {entries_.data() + p * knn_, knn_};
  }
  std::span<const double> degrees() const noexcept { return degrees_; }

  Matrix to_dense() const;
  /// B^T B (m x m).
  Matrix gram() const;
  /// B^T F (m x k) for F with rows() rows.
  Matrix transpose_times(const Matrix& f) const;
  /// B V (n_i x k) for V with cols() rows.
  Matrix times(const Matrix& v) const;

  friend BipartiteGraph build_bipartite(const Matrix& x, const Matrix& anchors, std::size_t knn);
  friend BipartiteGraph normalize(BipartiteGraph g);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t knn_ = 0;
  bool normalized_ = false;
  std::vector<GraphEntry> entries_;
  std::vector<double> degrees_;
};

/// Connect each sample to its knn nearest anchors (squared Euclidean) with
///   b_pq = (d_{p,knn+1} - d_pq) / (knn * d_{p,knn+1} - sum_{q' in knn} d_pq'),
/// falling back to uniform 1/knn weights when the denominator is <= 1e-12.
/// Requires 1 <= knn <= m - 1.
BipartiteGraph build_bipartite(const Matrix& x, const Matrix& anchors, std::size_t knn);

/// Scale column q by degrees[q]^{-1/2}; zero-degree columns stay zero.
BipartiteGraph normalize(BipartiteGraph g);

/// "row,col,weight" lines for every stored entry with nonzero weight.
void write_graph_triplets(const BipartiteGraph& g, const std::filesystem::path& path);

}  // namespace rise
