#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rise/matrix.hpp"

namespace rise {

// Strictly increasing 0-based sample positions of the instances available in
// one view. Stands in for the n x n_i selection matrix of that view.
class IndexVector {
 public:
  IndexVector() = default;
  explicit IndexVector(std::vector<std::size_t> indices);

  static IndexVector iota(std::size_t n);

  std::size_t size() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }
  std::size_t operator[](std::size_t j) const { return indices_[j]; }
  std::span<const std::size_t> indices() const noexcept { return indices_; }
  /// Largest index + 1, or 0 when empty.
  std::size_t extent() const noexcept { return indices_.empty() ? 0 : indices_.back() + 1; }

  auto begin() const noexcept { return indices_.begin(); }
  auto end() const noexcept { return indices_.end(); }

  bool operator==(const IndexVector&) const = default;

 private:
  std::vector<std::size_t> indices_;
};

// n x v availability table. Every sample is present in at least one view and
// every view holds at least one sample.
class Mask {
 public:
  Mask() = default;
  Mask(std::size_t n, std::size_t views, std::vector<std::uint8_t> table);

  static Mask complete(std::size_t n, std::size_t views);

  std::size_t n() const noexcept { return n_; }
  std::size_t views() const noexcept { return views_; }
  bool available(std::size_t sample, std::size_t view) const {
    return table_[sample * views_ + view] != 0;
  }
  std::span<const std::uint8_t> table() const noexcept { return table_; }

  /// Number of samples with every view present.
  std::size_t complete_rows() const;

  bool operator==(const Mask&) const = default;

 private:
  std::size_t n_ = 0;
  std::size_t views_ = 0;
  std::vector<std::uint8_t> table_;
};

inline constexpr std::size_t kMaskRetries = 100;

/// Simulate incomplete multi-view data: round((1 - p) n) uniformly chosen
/// samples keep every view; each remaining sample keeps a uniformly random
/// non-empty proper subset of the views. Draws that leave a view empty are
/// rerolled from a derived seed, at most kMaskRetries times.
Mask generate_mask(std::size_t n, std::size_t views, double missing_rate, std::uint64_t seed);

std::vector<IndexVector> mask_to_index_vectors(const Mask& mask);
Mask index_vectors_to_mask(std::span<const IndexVector> index_vectors, std::size_t n);

/// Row j of the result is row h[j] of y.
Matrix gather(const Matrix& y, const IndexVector& h);
/// Row h[j] of the result is row j of f; rows outside h are zero.
Matrix scatter(const Matrix& f, const IndexVector& h, std::size_t n);

}  // namespace rise
