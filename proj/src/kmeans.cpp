#include "rise/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "rise/error.hpp"
#include "rise/random.hpp"

namespace rise {

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double t = a[j] - b[j];
    s += t * t;
  }
  return s;
}

Matrix kmeanspp_init(const Matrix& x, std::size_t m, Rng& rng) {
  const std::size_t n = x.rows();
  Matrix centers(m, x.cols());
  std::size_t first = rng.below(n);
  std::copy(x.row(first).begin(), x.row(first).end(), centers.row(0).begin());
  std::vector<double> nearest(n);
  for (std::size_t r = 0; r < n; ++r) nearest[r] = sq_dist(x.row(r), centers.row(0));

  for (std::size_t k = 1; k < m; ++k) {
    const double total = std::accumulate(nearest.begin(), nearest.end(), 0.0);
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      pick = n - 1;
      for (std::size_t r = 0; r < n; ++r) {
        acc += nearest[r];
        if (acc > target && nearest[r] > 0.0) {
          pick = r;
          break;
        }
      }
    } else {
      pick = rng.below(n);
    }
    std::copy(x.row(pick).begin(), x.row(pick).end(), centers.row(k).begin());
    for (std::size_t r = 0; r < n; ++r) {
      nearest[r] = std::min(nearest[r], sq_dist(x.row(r), centers.row(k)));
    }
  }
  return centers;
}

// Nearest center per point (lowest index on ties); returns the inertia.
double assign(const Matrix& x, const Matrix& centers, std::vector<std::size_t>& labels,
              std::vector<double>& dist) {
  double inertia = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t k = 0; k < centers.rows(); ++k) {
      const double d = sq_dist(x.row(r), centers.row(k));
      if (d < best) {
        best = d;
        arg = k;
      }
    }
    labels[r] = arg;
    dist[r] = best;
    inertia += best;
  }
  return inertia;
}

// Give every empty cluster the point farthest from its center, taken from a
// cluster that can spare it. Returns true if anything moved.
bool repair_empty(std::size_t m, std::vector<std::size_t>& labels, std::vector<double>& dist) {
  std::vector<std::size_t> sizes(m, 0);
  for (const auto l : labels) ++sizes[l];
  bool moved = false;
  for (std::size_t k = 0; k < m; ++k) {
    if (sizes[k] != 0) continue;
    std::size_t far = labels.size();
    for (std::size_t r = 0; r < labels.size(); ++r) {
      if (sizes[labels[r]] < 2 || dist[r] < 0.0) continue;
      if (far == labels.size() || dist[r] > dist[far]) far = r;
    }
    if (far == labels.size()) throw ContractViolation("kmeans: cannot repair an empty cluster");
    --sizes[labels[far]];
    labels[far] = k;
    sizes[k] = 1;
    dist[far] = -1.0;  // pinned to its new cluster
    moved = true;
  }
  return moved;
}

Matrix means(const Matrix& x, const std::vector<std::size_t>& labels, std::size_t m) {
  Matrix c(m, x.cols());
  std::vector<std::size_t> sizes(m, 0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto dst = c.row(labels[r]);
    const auto src = x.row(r);
    for (std::size_t j = 0; j < x.cols(); ++j) dst[j] += src[j];
    ++sizes[labels[r]];
  }
  for (std::size_t k = 0; k < m; ++k) {
    for (double& v : c.row(k)) v /= static_cast<double>(sizes[k]);
  }
  return c;
}

double inertia_of(const Matrix& x, const Matrix& centers, const std::vector<std::size_t>& labels) {
  double s = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) s += sq_dist(x.row(r), centers.row(labels[r]));
  return s;
}

KMeansResult lloyd(const Matrix& x, std::size_t m, std::uint64_t seed, const KMeansOptions& opt) {
  Rng rng(seed);
  KMeansResult res;
  res.centers = kmeanspp_init(x, m, rng);
  std::vector<std::size_t> labels(x.rows());
  std::vector<double> dist(x.rows());

  for (std::size_t it = 0; it < opt.max_iters; ++it) {
    res.inertia_trace.push_back(assign(x, res.centers, labels, dist));
    repair_empty(m, labels, dist);
    Matrix next = means(x, labels, m);
    double shift = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      shift = std::max(shift, std::sqrt(sq_dist(next.row(k), res.centers.row(k))));
    }
    res.centers = std::move(next);
    res.iterations = it + 1;
    if (shift < opt.tol) break;
  }

  assign(x, res.centers, labels, dist);
  if (repair_empty(m, labels, dist)) res.centers = means(x, labels, m);
  res.inertia = inertia_of(x, res.centers, labels);
  res.assignments = std::move(labels);
  return res;
}

}  // namespace

KMeansResult kmeans(const Matrix& points, std::size_t m, std::uint64_t seed,
                    const KMeansOptions& options) {
  if (m == 0) throw ArgumentError("kmeans: m must be >= 1");
  if (points.rows() < m) {
    throw ArgumentError("kmeans: " + std::to_string(points.rows()) + " points cannot form " +
                        std::to_string(m) + " clusters");
  }
  for (const double v : points.data()) {
    if (!std::isfinite(v)) throw DataError("kmeans: non-finite input");
  }
  const std::size_t restarts = std::max<std::size_t>(options.restarts, 1);
  KMeansResult best;
  for (std::size_t s = 0; s < restarts; ++s) {
    KMeansResult run = lloyd(points, m, s == 0 ? seed : derive_seed(seed, s), options);
    if (s == 0 || run.inertia < best.inertia) best = std::move(run);
  }
  return best;
}

Matrix select_anchors(const Matrix& view, AnchorStrategy strategy, std::size_t m,
                      std::uint64_t seed) {
  if (m == 0) throw ArgumentError("select_anchors: m must be >= 1");
  if (view.rows() < m) {
    throw ArgumentError("select_anchors: " + std::to_string(view.rows()) +
                        " samples cannot supply " + std::to_string(m) + " anchors");
  }
  if (strategy == AnchorStrategy::kmeans) return kmeans(view, m, seed).centers;

  // Partial Fisher-Yates: the first m slots are a uniform draw without replacement.
  Rng rng(seed);
  std::vector<std::size_t> order(view.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Matrix anchors(m, view.cols());
  for (std::size_t i = 0; i < m; ++i) {
    std::swap(order[i], order[i + rng.below(order.size() - i)]);
    std::copy(view.row(order[i]).begin(), view.row(order[i]).end(), anchors.row(i).begin());
  }
  return anchors;
}

}  // namespace rise
