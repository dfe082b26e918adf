#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "rise/dataset_io.hpp"

namespace rise {

struct BlobConfig {
  std::size_t n = 1000;
  std::size_t clusters = 5;
  std::size_t views = 3;
  std::size_t latent_dim = 8;
  std::vector<std::size_t> view_dims;  ///< empty: every view gets 2 * latent_dim features
  double cluster_spread = 1.0;
  double center_scale = 10.0;
  double noise_sigma = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t view_dim(std::size_t view) const;
};

/// Gaussian blobs in a shared latent space, observed through one seeded
/// random linear map per view plus Gaussian noise. Samples are laid out
/// cluster by cluster; cluster sizes differ by at most one, with the
/// remainder going to the first clusters. All views are complete.
std::pair<MultiViewDataset, Labels> generate_blobs(const BlobConfig& cfg);

}  // namespace rise
