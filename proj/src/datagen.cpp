#include "rise/datagen.hpp"

#include <cmath>
#include <string>

#include "rise/error.hpp"
#include "rise/random.hpp"

namespace rise {

void BlobConfig::validate() const {
  if (clusters < 1) throw ArgumentError("blobs: need at least one cluster");
  if (n < clusters) throw ArgumentError("blobs: n must be >= number of clusters");
  if (views < 1) throw ArgumentError("blobs: need at least one view");
  if (latent_dim < 1) throw ArgumentError("blobs: latent_dim must be >= 1");
  if (!view_dims.empty() && view_dims.size() != views) {
    throw ArgumentError("blobs: view_dims must list one size per view");
  }
  for (const auto d : view_dims) {
    if (d < 1) throw ArgumentError("blobs: view dimensions must be >= 1");
  }
  if (!(cluster_spread >= 0.0) || !(center_scale >= 0.0) || !(noise_sigma >= 0.0)) {
    throw ArgumentError("blobs: spread, scale and noise must be non-negative");
  }
}

std::size_t BlobConfig::view_dim(std::size_t view) const {
  return view_dims.empty() ? 2 * latent_dim : view_dims[view];
}

std::pair<MultiViewDataset, Labels> generate_blobs(const BlobConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.n;
  const std::size_t c = cfg.clusters;

  Labels labels(n);
  {
    const std::size_t base = n / c;
    const std::size_t extra = n % c;
    std::size_t r = 0;
    for (std::size_t k = 0; k < c; ++k) {
      const std::size_t size = base + (k < extra ? 1 : 0);
      for (std::size_t i = 0; i < size; ++i) labels[r++] = k;
    }
  }

  Rng latent_rng(derive_seed(cfg.seed, 0));
  Matrix centers(c, cfg.latent_dim);
  for (double& x : centers.data()) x = cfg.center_scale * latent_rng.normal();
  Matrix latent(n, cfg.latent_dim);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < cfg.latent_dim; ++j) {
      latent(r, j) = centers(labels[r], j) + cfg.cluster_spread * latent_rng.normal();
    }
  }

  MultiViewDataset ds;
  ds.n_total = n;
  const double map_scale = 1.0 / std::sqrt(static_cast<double>(cfg.latent_dim));
  for (std::size_t v = 0; v < cfg.views; ++v) {
    Rng rng(derive_seed(cfg.seed, 1 + v));
    const std::size_t d = cfg.view_dim(v);
    Matrix map(cfg.latent_dim, d);
    for (double& x : map.data()) x = map_scale * rng.normal();
    Matrix view(n, d);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t j = 0; j < d; ++j) {
        double s = 0.0;
        for (std::size_t l = 0; l < cfg.latent_dim; ++l) s += latent(r, l) * map(l, j);
        view(r, j) = s + cfg.noise_sigma * rng.normal();
      }
    }
    ds.views.push_back(std::move(view));
    ds.index_vectors.push_back(IndexVector::iota(n));
  }
  ds.labels = labels;
  return {std::move(ds), std::move(labels)};
}

}  // namespace rise
