#pragma once

#include <cstddef>
#include <vector>

#include "rise/dataset_io.hpp"

namespace rise {

struct ContingencyTable {
  std::size_t pred_classes = 0;
  std::size_t true_classes = 0;
  std::vector<std::size_t> counts;  ///< pred_classes x true_classes, row-major
  std::size_t n = 0;

  std::size_t at(std::size_t pred, std::size_t truth) const {
    return counts[pred * true_classes + truth];
  }
};

/// Labels need not be canonical; ids are used as given.
ContingencyTable contingency(const Labels& pred, const Labels& truth);

/// Best one-to-one matching of predicted to true labels (Hungarian method on
/// the zero-padded square table), as a fraction of n.
double clustering_accuracy(const Labels& pred, const Labels& truth);
/// Mutual information over sqrt(H(pred) H(truth)), natural logs; 0 when
/// either entropy vanishes, 1 for identical partitions.
double nmi(const Labels& pred, const Labels& truth);
double purity(const Labels& pred, const Labels& truth);

struct ClusteringScores {
  double acc = 0.0;
  double nmi = 0.0;
  double purity = 0.0;
};

ClusteringScores evaluate(const Labels& pred, const Labels& truth);

/// Maximum-weight perfect assignment on a square matrix of weights.
/// Returns column index assigned to each row.
std::vector<std::size_t> max_weight_assignment(const std::vector<double>& weights, std::size_t size);

}  // namespace rise
