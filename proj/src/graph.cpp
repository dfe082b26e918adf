#include "rise/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include "rise/error.hpp"

namespace rise {

BipartiteGraph build_bipartite(const Matrix& x, const Matrix& anchors, std::size_t knn) {
  const std::size_t m = anchors.rows();
  if (x.cols() != anchors.cols()) {
    throw ArgumentError("build_bipartite: samples have " + std::to_string(x.cols()) +
                        " features, anchors " + std::to_string(anchors.cols()));
  }
  if (knn < 1 || knn + 1 > m) {
    throw ArgumentError("build_bipartite: knn=" + std::to_string(knn) +
                        " needs 1 <= knn <= m-1 with m=" + std::to_string(m));
  }

  BipartiteGraph g;
  g.rows_ = x.rows();
  g.cols_ = m;
  g.knn_ = knn;
  g.entries_.resize(x.rows() * knn);
  g.degrees_.assign(m, 0.0);

  std::vector<double> dist(m);
  std::vector<std::uint32_t> order(m);
  for (std::size_t p = 0; p < x.rows(); ++p) {
    const auto xp = x.row(p);
    for (std::size_t q = 0; q < m; ++q) {
      const auto aq = anchors.row(q);
      double s = 0.0;
      for (std::size_t j = 0; j < xp.size(); ++j) {
        const double t = xp[j] - aq[j];
        s += t * t;
      }
      if (!std::isfinite(s)) {
        throw DataError("build_bipartite: non-finite distance for sample " + std::to_string(p));
      }
      dist[q] = s;
    }
    std::iota(order.begin(), order.end(), std::uint32_t{0});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(knn + 1),
                      order.end(), [&](std::uint32_t a, std::uint32_t b) {
                        return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
                      });

    const double boundary = dist[order[knn]];
    double denom = 0.0;
    for (std::size_t j = 0; j < knn; ++j) denom += boundary - dist[order[j]];

    auto* row = g.entries_.data() + p * knn;
    for (std::size_t j = 0; j < knn; ++j) {
      const double w = denom > kTieTolerance ? (boundary - dist[order[j]]) / denom
                                             : 1.0 / static_cast<double>(knn);
      row[j] = {order[j], w};
      g.degrees_[order[j]] += w;
    }
  }
  return g;
}

BipartiteGraph normalize(BipartiteGraph g) {
  if (g.normalized_) throw ContractViolation("normalize: graph is already normalized");
  std::vector<double> factor(g.cols_);
  for (std::size_t q = 0; q < g.cols_; ++q) {
    factor[q] = g.degrees_[q] > kZeroDegree ? 1.0 / std::sqrt(g.degrees_[q]) : 0.0;
  }
  for (auto& e : g.entries_) e.weight *= factor[e.anchor];
  g.normalized_ = true;
  return g;
}

Matrix BipartiteGraph::to_dense() const {
  Matrix d(rows_, cols_);
  for (std::size_t p = 0; p < rows_; ++p) {
    for (const auto& e : row(p)) d(p, e.anchor) += e.weight;
  }
  return d;
}

Matrix BipartiteGraph::gram() const {
  Matrix g(cols_, cols_);
  for (std::size_t p = 0; p < rows_; ++p) {
    const auto r = row(p);
    for (const auto& a : r) {
      if (a.weight == 0.0) continue;
      for (const auto& b : r) g(a.anchor, b.anchor) += a.weight * b.weight;
    }
  }
  return g;
}

Matrix BipartiteGraph::transpose_times(const Matrix& f) const {
  if (f.rows() != rows_) throw ArgumentError("B^T F: row counts differ");
  Matrix out(cols_, f.cols());
  for (std::size_t p = 0; p < rows_; ++p) {
    const auto fp = f.row(p);
    for (const auto& e : row(p)) {
      if (e.weight == 0.0) continue;
      auto dst = out.row(e.anchor);
      for (std::size_t j = 0; j < fp.size(); ++j) dst[j] += e.weight * fp[j];
    }
  }
  return out;
}

Matrix BipartiteGraph::times(const Matrix& v) const {
  if (v.rows() != cols_) throw ArgumentError("B V: inner dimensions differ");
  Matrix out(rows_, v.cols());
  for (std::size_t p = 0; p < rows_; ++p) {
    auto dst = out.row(p);
    for (const auto& e : row(p)) {
      if (e.weight == 0.0) continue;
      const auto src = v.row(e.anchor);
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += e.weight * src[j];
    }
  }
  return out;
}

void write_graph_triplets(const BipartiteGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  char buf[32];
  for (std::size_t p = 0; p < g.rows(); ++p) {
    for (const auto& e : g.row(p)) {
      if (e.weight == 0.0) continue;
      const auto res = std::to_chars(buf, buf + sizeof buf, e.weight);
      out << p << ',' << e.anchor << ',' << std::string_view(buf, res.ptr - buf) << '\n';
    }
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace rise
