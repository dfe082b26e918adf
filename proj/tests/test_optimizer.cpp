#include <doctest.h>

#include <cmath>

#include "instances.hpp"
#include "oracles.hpp"
#include "rise/error.hpp"
#include "rise/linalg.hpp"
#include "rise/metrics.hpp"
#include "rise/optimizer.hpp"

using rise::IndexVector;
using rise::Matrix;

namespace {

Eigen::MatrixXd projector(const Matrix& f) {
  const Eigen::MatrixXd e = oracle::to_eigen(f);
  return e * e.transpose();
}

double projector_gap(const Matrix& a, const Matrix& b) {
  return (projector(a) - projector(b)).cwiseAbs().maxCoeff();
}

// S = 2 Y_h Y_h^T + beta B B^T for one view.
Eigen::MatrixXd embedding_operator(const Matrix& y_gathered, const rise::BipartiteGraph& g, double beta) {
  const Eigen::MatrixXd b = oracle::to_eigen(g.to_dense());
  return 2.0 * projector(y_gathered) + beta * b * b.transpose();
}

Eigen::MatrixXd consensus_operator(const std::vector<Matrix>& fs, const std::vector<IndexVector>& hs,
                                   std::size_t n) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < fs.size(); ++i) s += projector(rise::scatter(fs[i], hs[i], n));
  return s;
}

// Identity-shaped graph: sample p sits on anchor p, one neighbour each.
rise::BipartiteGraph identity_graph(std::size_t n) {
  Matrix x(n, 1), a(n + 1, 1);
  for (std::size_t i = 0; i < n; ++i) x(i, 0) = a(i, 0) = 10.0 * i;
  a(n, 0) = 1e4;
  return rise::normalize(rise::build_bipartite(x, a, 1));
}

}  // namespace

TEST_CASE("init_embeddings: identity graph") {
  const auto g = identity_graph(2);
  const std::vector<rise::BipartiteGraph> gs = {g};
  const auto f = rise::init_embeddings(gs, 2);
  CHECK(rise::orthonormality_error(f[0]) < 1e-12);
  const Eigen::MatrixXd b = oracle::to_eigen(g.to_dense());
  CHECK(oracle::trace_form(b * b.transpose(), f[0]) == doctest::Approx(2.0));
}

TEST_CASE("init_embeddings: diag(3,2,1) spectrum keeps the top two") {
  // Same Gram route as init_embeddings, applied to an explicit thin matrix.
  const Matrix b(4, 3, {3, 0, 0, 0, 2, 0, 0, 0, 1, 0, 0, 0});
  const auto u = rise::trunc_svd_left(b, 2).left_vectors;
  const Eigen::MatrixXd be = oracle::to_eigen(b);
  CHECK(oracle::trace_form(be * be.transpose(), u) == doctest::Approx(13.0));
}

TEST_CASE("init_embeddings: orthonormal on random graphs, k > m rejected") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    instances::ProblemSpec spec;
    spec.seed = seed;
    const auto p = instances::make_problem(spec);
    for (const auto& f : rise::init_embeddings(p.graphs, 3)) CHECK(rise::orthonormality_error(f) < 1e-8);
    CHECK_THROWS_AS(rise::init_embeddings(p.graphs, 9), rise::ArgumentError);
  }
}

TEST_CASE("update_consensus: single complete view reproduces its subspace") {
  rise::Rng rng(1);
  const Matrix f = oracle::random_orthonormal(12, 3, rng);
  const std::vector<Matrix> fs = {f};
  const std::vector<IndexVector> hs = {IndexVector::iota(12)};
  CHECK(projector_gap(rise::update_consensus(fs, hs, 12, 3), f) < 1e-8);

  const std::vector<Matrix> twice = {f, f};
  const std::vector<IndexVector> hs2 = {IndexVector::iota(12), IndexVector::iota(12)};
  CHECK(projector_gap(rise::update_consensus(twice, hs2, 12, 3), f) < 1e-8);
}

TEST_CASE("update_consensus: dense eigen oracle on small random masks") {
  rise::Rng rng(2);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = trial < 20 ? 4 : 5 + rng.below(40);
    const std::size_t k = trial < 20 ? 1 : 1 + rng.below(4);
    const auto mask = rise::generate_mask(n, 2, 0.5, trial);
    const auto hs = rise::mask_to_index_vectors(mask);
    std::vector<Matrix> fs;
    for (const auto& h : hs) {
      if (h.size() < k) break;
      fs.push_back(oracle::random_orthonormal(h.size(), k, rng));
    }
    if (fs.size() != hs.size()) continue;
    const Matrix y = rise::update_consensus(fs, hs, n, k);
    CHECK(rise::orthonormality_error(y) < 1e-8);
    const Eigen::MatrixXd s = consensus_operator(fs, hs, n);
    CHECK(std::abs(oracle::trace_form(s, y) - oracle::top_eigensum(s, k)) < 1e-8);
    for (int w = 0; w < 10; ++w) {
      CHECK(oracle::trace_form(s, y) >= oracle::trace_form(s, oracle::random_orthonormal(n, k, rng)) - 1e-8);
    }
  }
}

TEST_CASE("update_embedding: beta = 0 follows the consensus") {
  rise::Rng rng(3);
  instances::ProblemSpec spec;
  const auto p = instances::make_problem(spec);
  const auto& g = p.graphs[0];
  const Matrix yh = oracle::random_orthonormal(g.rows(), 3, rng);
  const Matrix f = rise::update_embedding(g, yh, 0.0, 3);
  CHECK(projector_gap(f, yh) < 1e-8);
}

TEST_CASE("update_embedding: void consensus reduces to the graph embedding") {
  instances::ProblemSpec spec;
  spec.seed = 4;
  const auto p = instances::make_problem(spec);
  const auto& g = p.graphs[1];
  const Matrix f = rise::update_embedding(g, Matrix(g.rows(), 3), 2.5, 3);
  const std::vector<rise::BipartiteGraph> one = {g};
  const Matrix f0 = rise::init_embeddings(one, 3)[0];
  CHECK(projector_gap(f, f0) < 1e-8);
}

TEST_CASE("update_embedding: dense eigen oracle and optimality against random frames") {
  rise::Rng rng(5);
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    instances::ProblemSpec spec;
    spec.seed = seed;
    spec.n = 15 + rng.below(36);
    const auto p = instances::make_problem(spec);
    const std::size_t k = 1 + rng.below(4);
    const Matrix y = oracle::random_orthonormal(p.dataset.n_total, k, rng);
    const double beta = std::pow(10.0, -2.0 + 4.0 * rng.uniform());
    for (std::size_t i = 0; i < p.graphs.size(); ++i) {
      const Matrix yh = rise::gather(y, p.dataset.index_vectors[i]);
      const Matrix f = rise::update_embedding(p.graphs[i], yh, beta, k);
      CHECK(rise::orthonormality_error(f) < 1e-8);
      const Eigen::MatrixXd s = embedding_operator(yh, p.graphs[i], beta);
      CHECK(std::abs(oracle::trace_form(s, f) - oracle::top_eigensum(s, k)) < 1e-8);
      for (int w = 0; w < 5; ++w) {
        CHECK(oracle::trace_form(s, f) >=
              oracle::trace_form(s, oracle::random_orthonormal(f.rows(), k, rng)) - 1e-8);
      }
    }
  }
}

TEST_CASE("objective: closed-form cases") {
  rise::Rng rng(6);
  const Matrix q = oracle::random_orthonormal(10, 4, rng);
  Matrix f(10, 2), y(10, 2);
  for (std::size_t r = 0; r < 10; ++r) {
    f(r, 0) = q(r, 0);
    f(r, 1) = q(r, 1);
    y(r, 0) = q(r, 2);
    y(r, 1) = q(r, 3);
  }
  const std::vector<rise::BipartiteGraph> gs = {identity_graph(10)};
  const std::vector<IndexVector> hs = {IndexVector::iota(10)};
  rise::RiseState s;
  s.embeddings = {f};
  s.consensus = f;
  CHECK(std::abs(rise::objective(s, gs, hs, 0.0)) < 1e-12);
  s.consensus = y;
  CHECK(rise::objective(s, gs, hs, 0.0) == doctest::Approx(4.0));
}

TEST_CASE("objective: efficient form equals the dense definition") {
  rise::Rng rng(7);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    instances::ProblemSpec spec;
    spec.seed = seed;
    spec.n = 10 + rng.below(51);
    spec.views = 2 + rng.below(2);
    const auto p = instances::make_problem(spec);
    const std::size_t k = 1 + rng.below(3);
    const auto s = instances::random_state(p, k, rng);
    const double beta = 0.1 + 10.0 * rng.uniform();
    std::vector<Eigen::MatrixXd> bs;
    for (const auto& g : p.graphs) bs.push_back(oracle::to_eigen(g.to_dense()));
    const double dense = oracle::dense_objective(s.consensus, s.embeddings, p.dataset.index_vectors, bs, beta);
    CHECK(std::abs(rise::objective(s, p.graphs, p.dataset.index_vectors, beta) - dense) < 1e-8);
  }
}

TEST_CASE("objective: invariant under orthogonal rotations") {
  rise::Rng rng(8);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    instances::ProblemSpec spec;
    spec.seed = seed;
    const auto p = instances::make_problem(spec);
    const std::size_t k = 3;
    auto s = instances::random_state(p, k, rng);
    const double before = rise::objective(s, p.graphs, p.dataset.index_vectors, 1.5);
    s.embeddings[0] = instances::rotate(s.embeddings[0], oracle::random_orthonormal(k, k, rng));
    CHECK(std::abs(rise::objective(s, p.graphs, p.dataset.index_vectors, 1.5) - before) < 1e-10);
    s.consensus = instances::rotate(s.consensus, oracle::random_orthonormal(k, k, rng));
    CHECK(std::abs(rise::objective(s, p.graphs, p.dataset.index_vectors, 1.5) - before) < 1e-10);
  }
}

TEST_CASE("first_order: averaging examples") {
  rise::Rng rng(9);
  const Matrix f = oracle::random_orthonormal(8, 2, rng);
  const std::vector<IndexVector> one = {IndexVector::iota(8)};
  const std::vector<Matrix> fs = {f};
  CHECK(rise::max_abs_diff(rise::first_order_consensus(fs, one, 8), f) < 1e-12);

  Matrix neg = f;
  for (double& x : neg.data()) x = -x;
  const std::vector<Matrix> flipped = {f, neg};
  const std::vector<IndexVector> two = {IndexVector::iota(8), IndexVector::iota(8)};
  CHECK(rise::frobenius_norm_sq(rise::first_order_average(flipped, two, 8)) == 0.0);
  CHECK(rise::orthonormality_error(rise::first_order_consensus(flipped, two, 8)) < 1e-12);

  const std::vector<Matrix> singles = {Matrix(1, 1, {1.0}), Matrix(1, 1, {1.0})};
  const std::vector<IndexVector> disjoint = {IndexVector({0}), IndexVector({1})};
  CHECK(rise::first_order_average(singles, disjoint, 2) == Matrix(2, 1, {1.0, 1.0}));
}

TEST_CASE("run_rise: monotone trace, orthonormal state, deterministic") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    instances::ProblemSpec spec;
    spec.seed = seed;
    spec.n = 80;
    spec.views = 3;
    spec.anchors = 10;
    const auto p = instances::make_problem(spec);
    rise::RiseConfig cfg;
    cfg.embed_dim = 3;
    cfg.beta = 0.5 + seed;
    cfg.seed = seed;
    const auto r = rise::run_rise(p.dataset, p.graphs, cfg, 3);
    CHECK(r.objective_trace.size() == r.iterations + 1);
    for (std::size_t t = 1; t < r.objective_trace.size(); ++t) {
      CHECK(r.objective_trace[t] <= r.objective_trace[t - 1] + 1e-9);
    }
    CHECK(rise::orthonormality_error(r.consensus) < 1e-8);
    CHECK(r.labels.size() == 80);
    for (const auto l : r.labels) CHECK(l < 3);
    const auto again = rise::run_rise(p.dataset, p.graphs, cfg, 3);
    CHECK(again.objective_trace == r.objective_trace);
    CHECK(again.labels == r.labels);
  }
}

// Exact recovery needs every anchor neighbourhood to stay inside one cluster
// (knn = 1 on zero-spread data) and row-normalized Y: samples held by fewer
// views end up with shorter consensus rows.
TEST_CASE("run_rise: zero-noise blobs are recovered exactly") {
  for (double rate : {0.0, 0.2, 0.5}) {
    for (std::size_t anchors : {3, 6}) {
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        instances::ProblemSpec spec;
        spec.n = 60;
        spec.views = 3;
        spec.clusters = 3;
        spec.anchors = anchors;
        spec.knn = 1;
        spec.spread = 0.0;
        spec.noise = 0.0;
        spec.center_scale = 10.0;
        spec.missing_rate = rate;
        spec.seed = seed;
        spec.anchor_strategy = rise::AnchorStrategy::kmeans;
        const auto p = instances::make_problem(spec);
        rise::RiseConfig cfg;
        cfg.embed_dim = 3;
        cfg.seed = seed;
        cfg.row_normalize = true;
        const auto r = rise::run_rise(p.dataset, p.graphs, cfg, 3);
        INFO("rate " << rate << " anchors " << anchors << " seed " << seed);
        CHECK(rise::clustering_accuracy(r.labels, p.labels) == 1.0);
      }
    }
  }
}

TEST_CASE("run_rise: max_iters = 0 clusters a single consensus update") {
  instances::ProblemSpec spec;
  spec.seed = 3;
  const auto p = instances::make_problem(spec);
  rise::RiseConfig cfg;
  cfg.embed_dim = 3;
  cfg.max_iters = 0;
  const auto r = rise::run_rise(p.dataset, p.graphs, cfg, 3);
  CHECK(r.iterations == 0);
  CHECK(r.objective_trace.size() == 1);
  const Matrix y = rise::update_consensus(rise::init_embeddings(p.graphs, 3), p.dataset.index_vectors,
                                          p.dataset.n_total, 3);
  CHECK(r.consensus == y);
}

TEST_CASE("run_rise: configuration errors") {
  instances::ProblemSpec spec;
  const auto p = instances::make_problem(spec);
  rise::RiseConfig cfg;
  cfg.embed_dim = 0;
  CHECK_THROWS_AS(rise::run_rise(p.dataset, p.graphs, cfg, 3), rise::ArgumentError);
  cfg.embed_dim = 3;
  cfg.beta = -1.0;
  CHECK_THROWS_AS(rise::run_rise(p.dataset, p.graphs, cfg, 3), rise::ArgumentError);
  cfg.beta = 1.0;
  CHECK_THROWS_AS(rise::run_rise(p.dataset, p.graphs, cfg, 0), rise::ArgumentError);
  const std::vector<rise::BipartiteGraph> raw = {
      rise::build_bipartite(p.dataset.views[0], Matrix(4, p.dataset.views[0].cols()), 2),
      rise::build_bipartite(p.dataset.views[1], Matrix(4, p.dataset.views[1].cols()), 2)};
  CHECK_THROWS_AS(rise::run_rise(p.dataset, raw, cfg, 3), rise::ContractViolation);
}

TEST_CASE("completion parsing") {
  CHECK(rise::parse_completion("first_order") == rise::Completion::first_order);
  CHECK(rise::parse_completion("second-order") == rise::Completion::second_order);
  CHECK_THROWS_AS(rise::parse_completion("third"), rise::ArgumentError);
}
