#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rise/masking.hpp"
#include "rise/matrix.hpp"

namespace rise {

// Cluster / class ids, contiguous from 0 after canonicalization.
using Labels = std::vector<std::size_t>;

// Per-view instance matrices (rows = available samples of that view, in the
// order given by the matching index vector) over n_total samples.
struct MultiViewDataset {
  std::vector<Matrix> views;
  std::vector<IndexVector> index_vectors;
  std::size_t n_total = 0;
  std::optional<Labels> labels;

  std::size_t num_views() const noexcept { return views.size(); }
  /// Throws ArgumentError when the structural invariants do not hold.
  void validate() const;
};

/// Restrict complete views (n rows each) to the instances the mask keeps.
/// A view that already has exactly as many rows as the mask keeps for it is
/// taken as pre-gathered.
MultiViewDataset apply_mask(std::span<const Matrix> views, const Mask& mask,
                            std::optional<Labels> labels = std::nullopt);

// RMAT: 'R' 'M' 'A' 'T', version byte 1, rows (u64 LE), cols (u64 LE),
// rows * cols IEEE-754 doubles (LE), row-major.
inline constexpr std::size_t kRmatHeaderBytes = 21;
inline constexpr std::uint8_t kRmatVersion = 1;

std::vector<std::uint8_t> encode_rmat(const Matrix& m);
Matrix decode_rmat(std::span<const std::uint8_t> bytes);
/// Comma-separated, '.' decimal separator, no header row.
Matrix parse_csv_matrix(std::string_view text);

/// Loads RMAT (detected by magic bytes) or CSV.
Matrix read_matrix(const std::filesystem::path& path);
/// Always writes RMAT.
void write_matrix(const Matrix& m, const std::filesystem::path& path);
void write_matrix_csv(const Matrix& m, const std::filesystem::path& path);

/// Remap arbitrary integer ids to 0-based ids by first occurrence.
Labels canonicalize_labels(std::span<const long long> raw);
Labels parse_labels(std::string_view text);
Labels read_labels(const std::filesystem::path& path);
void write_labels(const Labels& labels, const std::filesystem::path& path);

/// n lines of v comma-separated 0/1 flags.
Mask parse_mask(std::string_view text);
Mask read_mask(const std::filesystem::path& path);
void write_mask(const Mask& mask, const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(std::span<const std::uint8_t> bytes, const std::filesystem::path& path);

}  // namespace rise
