#include "rise/masking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "rise/error.hpp"
#include "rise/random.hpp"

namespace rise {

IndexVector::IndexVector(std::vector<std::size_t> indices) : indices_(std::move(indices)) {
  for (std::size_t j = 1; j < indices_.size(); ++j) {
    if (indices_[j] <= indices_[j - 1]) {
      throw ArgumentError("index vector must be strictly increasing (position " +
                          std::to_string(j) + ")");
    }
  }
}

IndexVector IndexVector::iota(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return IndexVector(std::move(idx));
}

Mask::Mask(std::size_t n, std::size_t views, std::vector<std::uint8_t> table)
    : n_(n), views_(views), table_(std::move(table)) {
  if (n_ == 0 || views_ == 0) throw ArgumentError("mask needs at least one sample and one view");
  if (table_.size() != n_ * views_) throw LengthError("mask table size does not match n x v");
  for (auto& x : table_) x = x != 0;
  for (std::size_t r = 0; r < n_; ++r) {
    bool any = false;
    for (std::size_t v = 0; v < views_; ++v) any = any || available(r, v);
    if (!any) throw DegenerateMaskError("sample " + std::to_string(r) + " is missing from every view");
  }
  for (std::size_t v = 0; v < views_; ++v) {
    bool any = false;
    for (std::size_t r = 0; r < n_; ++r) any = any || available(r, v);
    if (!any) throw DegenerateMaskError("view " + std::to_string(v) + " has no samples");
  }
}

Mask Mask::complete(std::size_t n, std::size_t views) {
  return Mask(n, views, std::vector<std::uint8_t>(n * views, 1));
}

std::size_t Mask::complete_rows() const {
  std::size_t count = 0;
  for (std::size_t r = 0; r < n_; ++r) {
    bool all = true;
    for (std::size_t v = 0; v < views_; ++v) all = all && available(r, v);
    count += all;
  }
  return count;
}

namespace {

// One draw of the protocol; empty views are possible here and rejected by
// the caller.
std::vector<std::uint8_t> draw_mask(std::size_t n, std::size_t views, std::size_t n_complete,
                                    std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

  std::vector<std::uint8_t> table(n * views, 1);
  // Non-empty proper subsets of v views are the bit patterns 1 .. 2^v - 2.
  const std::uint64_t subsets = (std::uint64_t{1} << views) - 2;
  for (std::size_t i = n_complete; i < n; ++i) {
    const std::size_t r = order[i];
    const std::uint64_t pattern = 1 + rng.below(subsets);
    for (std::size_t v = 0; v < views; ++v) table[r * views + v] = (pattern >> v) & 1U;
  }
  return table;
}

}  // namespace

Mask generate_mask(std::size_t n, std::size_t views, double missing_rate, std::uint64_t seed) {
  if (n == 0 || views == 0) throw ArgumentError("generate_mask: n and views must be >= 1");
  if (!(missing_rate >= 0.0 && missing_rate < 1.0)) {
    throw ArgumentError("generate_mask: missing rate must lie in [0, 1)");
  }
  if (views > 62) throw ArgumentError("generate_mask: at most 62 views are supported");
  if (views == 1 && missing_rate > 0.0) {
    throw ArgumentError("generate_mask: a single view cannot drop instances");
  }
  const auto n_complete =
      static_cast<std::size_t>(std::llround((1.0 - missing_rate) * static_cast<double>(n)));

  for (std::size_t attempt = 0; attempt < kMaskRetries; ++attempt) {
    const std::uint64_t s = attempt == 0 ? seed : derive_seed(seed, attempt);
    auto table = draw_mask(n, views, n_complete, s);
    bool ok = true;
    for (std::size_t v = 0; v < views && ok; ++v) {
      bool any = false;
      for (std::size_t r = 0; r < n && !any; ++r) any = table[r * views + v] != 0;
      ok = any;
    }
    if (ok) return Mask(n, views, std::move(table));
  }
  throw DegenerateMaskError("generate_mask: every draw left a view empty after " +
                            std::to_string(kMaskRetries) + " attempts");
}

std::vector<IndexVector> mask_to_index_vectors(const Mask& mask) {
  std::vector<IndexVector> out;
  out.reserve(mask.views());
  for (std::size_t v = 0; v < mask.views(); ++v) {
    std::vector<std::size_t> idx;
    for (std::size_t r = 0; r < mask.n(); ++r) {
      if (mask.available(r, v)) idx.push_back(r);
    }
    out.emplace_back(std::move(idx));
  }
  return out;
}

Mask index_vectors_to_mask(std::span<const IndexVector> index_vectors, std::size_t n) {
  std::vector<std::uint8_t> table(n * index_vectors.size(), 0);
  for (std::size_t v = 0; v < index_vectors.size(); ++v) {
    for (const std::size_t r : index_vectors[v]) {
      if (r >= n) throw ContractViolation("index " + std::to_string(r) + " out of range");
      table[r * index_vectors.size() + v] = 1;
    }
  }
  return Mask(n, index_vectors.size(), std::move(table));
}

Matrix gather(const Matrix& y, const IndexVector& h) {
  if (h.extent() > y.rows()) {
    throw ContractViolation("gather: index " + std::to_string(h.extent() - 1) +
                            " out of range for " + std::to_string(y.rows()) + " rows");
  }
  Matrix out(h.size(), y.cols());
  for (std::size_t j = 0; j < h.size(); ++j) {
    std::copy(y.row(h[j]).begin(), y.row(h[j]).end(), out.row(j).begin());
  }
  return out;
}

Matrix scatter(const Matrix& f, const IndexVector& h, std::size_t n) {
  if (f.rows() != h.size()) throw ContractViolation("scatter: row count differs from index length");
  if (h.extent() > n) {
    throw ContractViolation("scatter: index " + std::to_string(h.extent() - 1) +
                            " out of range for " + std::to_string(n) + " rows");
  }
  Matrix out(n, f.cols());
  for (std::size_t j = 0; j < h.size(); ++j) {
    std::copy(f.row(j).begin(), f.row(j).end(), out.row(h[j]).begin());
  }
  return out;
}

}  // namespace rise
