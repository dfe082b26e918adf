#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rise/matrix.hpp"

namespace rise {

/// Eigen-decomposition of a small symmetric matrix.
struct SymEig {
  std::vector<double> values;  ///< descending
  Matrix vectors;              ///< column j pairs with values[j]; orthonormal
};

/// Leading left singular vectors of a tall matrix.
struct TruncatedSvd {
  Matrix left_vectors;                 ///< n x k, orthonormal columns
  std::vector<double> singular_values;  ///< descending, non-negative
};

inline constexpr double kRankTolerance = 1e-10;
inline constexpr std::uint64_t kCompletionSeed = 0x5249534555ULL;

/// Cyclic Jacobi eigensolver for a symmetric d x d matrix.
///
/// The input is symmetrized as (S + S^T) / 2 after checking that it is
/// symmetric to within 1e-9 (scaled by max(1, max|S|)). Sweeps run until every
/// off-diagonal magnitude is below 1e-12 * ||S||_F, capped at 100 sweeps.
/// Eigenpairs come back sorted by descending eigenvalue.
SymEig sym_eigh(const Matrix& s);

/// G = Z^T Z.
Matrix gram(const Matrix& z);

/// Top-k left singular vectors of Z (n x d, k <= d <= n) through the d x d
/// Gram matrix: eigen-decompose Z^T Z = V L V^T, then U_j = Z v_j / sigma_j.
/// Directions with sigma_j <= kRankTolerance * sigma_1 are filled by seeded
/// random vectors orthonormalized against the earlier columns. Each column's
/// first nonzero entry is made non-negative.
TruncatedSvd trunc_svd_left(const Matrix& z, std::size_t k,
                            std::uint64_t seed = kCompletionSeed);

/// Same as trunc_svd_left, for callers that already hold G = Z^T Z and can
/// apply Z to a d x k block more cheaply than materializing Z.
/// `apply_z(V)` must return Z * V (n x k).
TruncatedSvd trunc_svd_left_from_gram(const Matrix& g, std::size_t n, std::size_t k,
                                      const std::function<Matrix(const Matrix&)>& apply_z,
                                      std::uint64_t seed = kCompletionSeed);

/// Modified Gram-Schmidt (two passes) on the columns of `q`, in place.
/// Columns that collapse (norm below `drop_tol` times their original norm, or
/// exactly zero) are replaced by seeded random directions.
void orthonormalize_columns(Matrix& q, std::uint64_t seed = kCompletionSeed,
                            double drop_tol = 1e-8);

/// Flip column signs so that each column's first nonzero entry is >= 0.
void canonicalize_signs(Matrix& q);

Matrix transpose(const Matrix& a);
Matrix matmul(const Matrix& a, const Matrix& b);
/// A^T B without forming A^T.
Matrix matmul_tn(const Matrix& a, const Matrix& b);
/// Horizontal concatenation; all blocks must share the row count.
Matrix hcat(std::span<const Matrix> blocks);

double frobenius_norm_sq(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);
/// max |Q^T Q - I|
double orthonormality_error(const Matrix& q);

}  // namespace rise
