#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rise/dataset_io.hpp"
#include "rise/graph.hpp"
#include "rise/masking.hpp"
#include "rise/matrix.hpp"

namespace rise {

enum class Completion { second_order, first_order };

std::string_view to_string(Completion c);
Completion parse_completion(std::string_view text);

struct RiseConfig {
  double beta = 1.0;
  std::size_t embed_dim = 0;
  std::size_t max_iters = 50;
  double rel_tol = 1e-6;
  std::uint64_t seed = 0;
  Completion completion = Completion::second_order;
  /// Scale each row of Y to unit length before the final k-means.
  bool row_normalize = false;
  std::size_t kmeans_restarts = 10;

  void validate() const;
};

struct RiseState {
  std::vector<Matrix> embeddings;  ///< F^(i), n_i x k
  Matrix consensus;                ///< Y, n x k
  std::vector<double> objective_trace;
  std::size_t iterations = 0;
};

struct StageTimings {
  double init_ms = 0.0;
  std::vector<double> iteration_ms;
  double kmeans_ms = 0.0;
  double total_ms = 0.0;
};

struct RiseResult {
  Matrix consensus;
  Labels labels;
  std::vector<double> objective_trace;
  std::vector<double> trace_elapsed_ms;  ///< cumulative, aligned with objective_trace
  std::size_t iterations = 0;
  bool converged = false;
  StageTimings timings;
  RiseConfig config;
};

/// F^(i) = top-k left singular vectors of each normalized graph.
std::vector<Matrix> init_embeddings(std::span<const BipartiteGraph> graphs, std::size_t k);

/// Y = top-k left singular vectors of [scatter(F^(1)), ..., scatter(F^(v))].
Matrix update_consensus(std::span<const Matrix> embeddings,
                        std::span<const IndexVector> index_vectors, std::size_t n,
                        std::size_t k);

/// Caches B^T B for one view so that each embedding update costs
/// O(n_i (knn k + k^2)) plus a (k + m)-sized eigenproblem.
class EmbeddingUpdater {
 public:
  explicit EmbeddingUpdater(const BipartiteGraph& graph);

  /// F = top-k left singular vectors of [sqrt(2) * y_gathered, sqrt(beta) * B].
  Matrix update(const Matrix& y_gathered, double beta, std::size_t k) const;

 private:
  const BipartiteGraph* graph_;
  Matrix graph_gram_;
};

Matrix update_embedding(const BipartiteGraph& graph, const Matrix& y_gathered, double beta,
                        std::size_t k);

/// sum_i (2k - 2 ||F^(i)T gather(Y, h^(i))||_F^2) - beta sum_i ||B^(i)T F^(i)||_F^2,
/// which equals the squared-Frobenius consensus loss minus the graph term
/// whenever Y and every F^(i) have orthonormal columns.
double objective(const RiseState& state, std::span<const BipartiteGraph> graphs,
                 std::span<const IndexVector> index_vectors, double beta);

/// Row r = mean of the rows of F^(i) mapped to r across the views that hold
/// r; zero if no view holds it.
Matrix first_order_average(std::span<const Matrix> embeddings,
                           std::span<const IndexVector> index_vectors, std::size_t n);

/// first_order_average with its columns orthonormalized.
Matrix first_order_consensus(std::span<const Matrix> embeddings,
                             std::span<const IndexVector> index_vectors, std::size_t n);

/// Full alternating optimization followed by k-means on Y with c clusters.
/// `initial_embeddings`, when given, replaces the graph-derived start.
RiseResult run_rise(const MultiViewDataset& dataset, std::span<const BipartiteGraph> graphs,
                    const RiseConfig& cfg, std::size_t clusters,
                    std::optional<std::vector<Matrix>> initial_embeddings = std::nullopt);

}  // namespace rise
