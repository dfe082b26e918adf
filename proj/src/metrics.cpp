#include "rise/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rise/error.hpp"

namespace rise {

namespace {

void check_pair(const Labels& pred, const Labels& truth) {
  if (pred.size() != truth.size()) {
    throw ArgumentError("label vectors differ in length (" + std::to_string(pred.size()) + " vs " +
                        std::to_string(truth.size()) + ")");
  }
  if (pred.empty()) throw ArgumentError("label vectors are empty");
}

double entropy(const std::vector<std::size_t>& counts, double n) {
  double h = 0.0;
  for (const auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log(p);
  }
  return h;
}

bool same_partition(const Labels& a, const Labels& b) {
  const std::size_t ka = *std::max_element(a.begin(), a.end()) + 1;
  const std::size_t kb = *std::max_element(b.begin(), b.end()) + 1;
  constexpr auto unset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> ab(ka, unset), ba(kb, unset);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (ab[a[i]] == unset && ba[b[i]] == unset) {
      ab[a[i]] = b[i];
      ba[b[i]] = a[i];
    } else if (ab[a[i]] != b[i] || ba[b[i]] != a[i]) {
      return false;
    }
  }
  return true;
}

}  // namespace

ContingencyTable contingency(const Labels& pred, const Labels& truth) {
  check_pair(pred, truth);
  ContingencyTable t;
  t.pred_classes = *std::max_element(pred.begin(), pred.end()) + 1;
  t.true_classes = *std::max_element(truth.begin(), truth.end()) + 1;
  t.counts.assign(t.pred_classes * t.true_classes, 0);
  for (std::size_t i = 0; i < pred.size(); ++i) ++t.counts[pred[i] * t.true_classes + truth[i]];
  t.n = pred.size();
  return t;
}

// Hungarian method with row/column potentials (minimization of
// max_weight - w), O(size^3).
std::vector<std::size_t> max_weight_assignment(const std::vector<double>& weights, std::size_t size) {
  if (weights.size() != size * size) throw ArgumentError("assignment: weight matrix is not square");
  if (size == 0) return {};
  const double top = *std::max_element(weights.begin(), weights.end());
  auto cost = [&](std::size_t i, std::size_t j) { return top - weights[(i - 1) * size + (j - 1)]; };

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(size + 1, 0.0), v(size + 1, 0.0);
  std::vector<std::size_t> p(size + 1, 0), way(size + 1, 0);
  for (std::size_t i = 1; i <= size; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(size + 1, inf);
    std::vector<bool> used(size + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= size; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= size; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(size);
  for (std::size_t j = 1; j <= size; ++j) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

double clustering_accuracy(const Labels& pred, const Labels& truth) {
  const ContingencyTable t = contingency(pred, truth);
  const std::size_t size = std::max(t.pred_classes, t.true_classes);
  std::vector<double> w(size * size, 0.0);
  for (std::size_t i = 0; i < t.pred_classes; ++i) {
    for (std::size_t j = 0; j < t.true_classes; ++j) w[i * size + j] = static_cast<double>(t.at(i, j));
  }
  const auto match = max_weight_assignment(w, size);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < t.pred_classes; ++i) {
    if (match[i] < t.true_classes) hits += t.at(i, match[i]);
  }
  return static_cast<double>(hits) / static_cast<double>(t.n);
}

double nmi(const Labels& pred, const Labels& truth) {
  const ContingencyTable t = contingency(pred, truth);
  if (same_partition(pred, truth)) return 1.0;
  const double n = static_cast<double>(t.n);
  std::vector<std::size_t> rows(t.pred_classes, 0), cols(t.true_classes, 0);
  for (std::size_t i = 0; i < t.pred_classes; ++i) {
    for (std::size_t j = 0; j < t.true_classes; ++j) {
      rows[i] += t.at(i, j);
      cols[j] += t.at(i, j);
    }
  }
  const double hp = entropy(rows, n);
  const double ht = entropy(cols, n);
  if (hp <= 0.0 || ht <= 0.0) return 0.0;
  double mi = 0.0;
  for (std::size_t i = 0; i < t.pred_classes; ++i) {
    for (std::size_t j = 0; j < t.true_classes; ++j) {
      const auto c = t.at(i, j);
      if (c == 0) continue;
      const double pij = static_cast<double>(c) / n;
      mi += pij * std::log(pij * n * n / (static_cast<double>(rows[i]) * static_cast<double>(cols[j])));
    }
  }
  return std::clamp(mi / std::sqrt(hp * ht), 0.0, 1.0);
}

double purity(const Labels& pred, const Labels& truth) {
  const ContingencyTable t = contingency(pred, truth);
  std::size_t total = 0;
  for (std::size_t i = 0; i < t.pred_classes; ++i) {
    std::size_t best = 0;
    for (std::size_t j = 0; j < t.true_classes; ++j) best = std::max(best, t.at(i, j));
    total += best;
  }
  return static_cast<double>(total) / static_cast<double>(t.n);
}

ClusteringScores evaluate(const Labels& pred, const Labels& truth) {
  return {clustering_accuracy(pred, truth), nmi(pred, truth), purity(pred, truth)};
}

}  // namespace rise
