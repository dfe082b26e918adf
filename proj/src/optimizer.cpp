#include "rise/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "rise/error.hpp"
#include "rise/kmeans.hpp"
#include "rise/linalg.hpp"
#include "rise/random.hpp"

namespace rise {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void check_views(std::span<const Matrix> embeddings, std::span<const IndexVector> index_vectors,
                 std::size_t n) {
  if (embeddings.size() != index_vectors.size()) {
    throw ArgumentError("embedding and index vector counts differ");
  }
  if (embeddings.empty()) throw ArgumentError("no views");
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    if (embeddings[i].rows() != index_vectors[i].size()) {
      throw ArgumentError("view " + std::to_string(i) + ": embedding rows differ from index length");
    }
    if (index_vectors[i].extent() > n) {
      throw ContractViolation("view " + std::to_string(i) + ": index past n");
    }
  }
}

// sum over entries of (A^T B) squared for equal-row A, B: ||A^T B||_F^2.
double cross_norm_sq(const Matrix& a, const Matrix& b) { return frobenius_norm_sq(matmul_tn(a, b)); }

}  // namespace

std::string_view to_string(Completion c) {
  return c == Completion::second_order ? "second_order" : "first_order";
}

Completion parse_completion(std::string_view text) {
  if (text == "second_order" || text == "second-order") return Completion::second_order;
  if (text == "first_order" || text == "first-order") return Completion::first_order;
  throw ArgumentError("unknown completion strategy '" + std::string(text) + "'");
}

void RiseConfig::validate() const {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ArgumentError("beta must be a finite value >= 0");
  if (embed_dim < 1) throw ArgumentError("embed_dim must be >= 1");
  if (!(rel_tol > 0.0)) throw ArgumentError("rel_tol must be > 0");
}

std::vector<Matrix> init_embeddings(std::span<const BipartiteGraph> graphs, std::size_t k) {
  std::vector<Matrix> out;
  out.reserve(graphs.size());
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    const auto& g = graphs[i];
    if (!g.normalized()) throw ContractViolation("init_embeddings: graph is not normalized");
    if (k > g.cols()) {
      throw ArgumentError("init_embeddings: k=" + std::to_string(k) + " exceeds m=" +
                          std::to_string(g.cols()) + " in view " + std::to_string(i));
    }
    out.push_back(trunc_svd_left_from_gram(g.gram(), g.rows(), k,
                                           [&](const Matrix& v) { return g.times(v); })
                      .left_vectors);
  }
  return out;
}

Matrix update_consensus(std::span<const Matrix> embeddings,
                        std::span<const IndexVector> index_vectors, std::size_t n, std::size_t k) {
  check_views(embeddings, index_vectors, n);
  std::vector<Matrix> blocks;
  blocks.reserve(embeddings.size());
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    blocks.push_back(scatter(embeddings[i], index_vectors[i], n));
  }
  return trunc_svd_left(hcat(blocks), k).left_vectors;
}

EmbeddingUpdater::EmbeddingUpdater(const BipartiteGraph& graph)
    : graph_(&graph), graph_gram_(graph.gram()) {}

Matrix EmbeddingUpdater::update(const Matrix& y_gathered, double beta, std::size_t k) const {
  const BipartiteGraph& b = *graph_;
  const std::size_t ni = b.rows();
  const std::size_t ky = y_gathered.cols();
  const std::size_t m = b.cols();
  if (y_gathered.rows() != ni) throw ArgumentError("update_embedding: gathered Y has wrong row count");
  if (!(beta >= 0.0)) throw ArgumentError("update_embedding: beta must be >= 0");
  for (const double x : y_gathered.data()) {
    if (!std::isfinite(x)) throw DataError("update_embedding: non-finite consensus entry");
  }

  // Gram of Z = [sqrt(2) Y, sqrt(beta) B] assembled blockwise; B^T B is cached.
  const double a = std::sqrt(2.0);
  const double c = std::sqrt(beta);
  const Matrix yty = gram(y_gathered);
  const Matrix bty = b.transpose_times(y_gathered);  // m x ky
  Matrix g(ky + m, ky + m);
  for (std::size_t i = 0; i < ky; ++i) {
    for (std::size_t j = 0; j < ky; ++j) g(i, j) = 2.0 * yty(i, j);
  }
  for (std::size_t q = 0; q < m; ++q) {
    for (std::size_t j = 0; j < ky; ++j) {
      g(ky + q, j) = a * c * bty(q, j);
      g(j, ky + q) = a * c * bty(q, j);
    }
    for (std::size_t r = 0; r < m; ++r) g(ky + q, ky + r) = beta * graph_gram_(q, r);
  }

  auto apply_z = [&](const Matrix& v) {
    Matrix top(ky, v.cols());
    Matrix bottom(m, v.cols());
    for (std::size_t r = 0; r < ky; ++r) {
      for (std::size_t j = 0; j < v.cols(); ++j) top(r, j) = a * v(r, j);
    }
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t j = 0; j < v.cols(); ++j) bottom(r, j) = c * v(ky + r, j);
    }
    Matrix out = matmul(y_gathered, top);
    const Matrix bv = b.times(bottom);
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] += bv.data()[i];
    return out;
  };
  return trunc_svd_left_from_gram(g, ni, k, apply_z).left_vectors;
}

Matrix update_embedding(const BipartiteGraph& graph, const Matrix& y_gathered, double beta,
                        std::size_t k) {
  return EmbeddingUpdater(graph).update(y_gathered, beta, k);
}

double objective(const RiseState& state, std::span<const BipartiteGraph> graphs,
                 std::span<const IndexVector> index_vectors, double beta) {
  check_views(state.embeddings, index_vectors, state.consensus.rows());
  if (graphs.size() != state.embeddings.size()) throw ArgumentError("objective: graph count differs");
  const double k = static_cast<double>(state.consensus.cols());
  double consensus_term = 0.0;
  double graph_term = 0.0;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    const Matrix& f = state.embeddings[i];
    consensus_term += 2.0 * k - 2.0 * cross_norm_sq(f, gather(state.consensus, index_vectors[i]));
    graph_term += frobenius_norm_sq(graphs[i].transpose_times(f));
  }
  return consensus_term - beta * graph_term;
}

Matrix first_order_average(std::span<const Matrix> embeddings,
                           std::span<const IndexVector> index_vectors, std::size_t n) {
  check_views(embeddings, index_vectors, n);
  const std::size_t k = embeddings.front().cols();
  Matrix y(n, k);
  std::vector<std::size_t> counts(n, 0);
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    if (embeddings[i].cols() != k) throw ArgumentError("first_order_consensus: embedding widths differ");
    const auto& h = index_vectors[i];
    for (std::size_t j = 0; j < h.size(); ++j) {
      auto dst = y.row(h[j]);
      const auto src = embeddings[i].row(j);
      for (std::size_t c = 0; c < k; ++c) dst[c] += src[c];
      ++counts[h[j]];
    }
  }
  for (std::size_t r = 0; r < n; ++r) {
    if (counts[r] > 1) {
      for (double& x : y.row(r)) x /= static_cast<double>(counts[r]);
    }
  }
  return y;
}

Matrix first_order_consensus(std::span<const Matrix> embeddings,
                             std::span<const IndexVector> index_vectors, std::size_t n) {
  Matrix y = first_order_average(embeddings, index_vectors, n);
  orthonormalize_columns(y);
  return y;
}

RiseResult run_rise(const MultiViewDataset& dataset, std::span<const BipartiteGraph> graphs,
                    const RiseConfig& cfg, std::size_t clusters,
                    std::optional<std::vector<Matrix>> initial_embeddings) {
  cfg.validate();
  dataset.validate();
  if (clusters < 1) throw ArgumentError("run_rise: need at least one cluster");
  if (clusters > dataset.n_total) throw ArgumentError("run_rise: more clusters than samples");
  if (graphs.size() != dataset.num_views()) throw ArgumentError("run_rise: one graph per view required");
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    if (graphs[i].rows() != dataset.index_vectors[i].size()) {
      throw ArgumentError("run_rise: graph " + std::to_string(i) + " row count differs from view");
    }
  }
  const std::size_t n = dataset.n_total;
  const std::size_t k = cfg.embed_dim;
  const auto& h = dataset.index_vectors;
  const auto t_start = Clock::now();

  RiseResult res;
  res.config = cfg;
  RiseState state;
  state.embeddings = initial_embeddings ? std::move(*initial_embeddings) : init_embeddings(graphs, k);
  if (state.embeddings.size() != graphs.size()) throw ArgumentError("run_rise: initial embedding count");
  for (const auto& f : state.embeddings) {
    if (f.cols() != k) throw ArgumentError("run_rise: initial embedding width differs from embed_dim");
  }
  res.timings.init_ms = ms_since(t_start);

  const auto t_loop = Clock::now();
  auto record = [&] {
    state.objective_trace.push_back(objective(state, graphs, h, cfg.beta));
    res.trace_elapsed_ms.push_back(ms_since(t_loop));
  };

  if (cfg.completion == Completion::first_order) {
    // Separate pipeline: graph embeddings, then first-order averaging once.
    state.consensus = first_order_consensus(state.embeddings, h, n);
    record();
  } else {
    std::vector<EmbeddingUpdater> updaters;
    updaters.reserve(graphs.size());
    for (const auto& g : graphs) updaters.emplace_back(g);

    state.consensus = update_consensus(state.embeddings, h, n, k);
    record();
    for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
      const auto t_iter = Clock::now();
      if (it > 1) state.consensus = update_consensus(state.embeddings, h, n, k);
      for (std::size_t i = 0; i < graphs.size(); ++i) {
        state.embeddings[i] = updaters[i].update(gather(state.consensus, h[i]), cfg.beta, k);
      }
      record();
      res.timings.iteration_ms.push_back(ms_since(t_iter));
      state.iterations = it;
      const double prev = state.objective_trace[state.objective_trace.size() - 2];
      const double cur = state.objective_trace.back();
      if (std::abs(cur - prev) <= cfg.rel_tol * (std::abs(prev) + 1.0)) {
        res.converged = true;
        break;
      }
    }
  }

  const auto t_km = Clock::now();
  Matrix points = state.consensus;
  if (cfg.row_normalize) {
    for (std::size_t r = 0; r < points.rows(); ++r) {
      double s = 0.0;
      for (const double x : points.row(r)) s += x * x;
      if (s > 0.0) {
        for (double& x : points.row(r)) x /= std::sqrt(s);
      }
    }
  }
  KMeansOptions km;
  km.restarts = cfg.kmeans_restarts;
  res.labels = kmeans(points, clusters, derive_seed(cfg.seed, 2), km).assignments;
  res.timings.kmeans_ms = ms_since(t_km);

  res.consensus = std::move(state.consensus);
  res.objective_trace = std::move(state.objective_trace);
  res.iterations = state.iterations;
  res.timings.total_ms = ms_since(t_start);
  return res;
}

}  // namespace rise
