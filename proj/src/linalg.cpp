#include "rise/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "rise/error.hpp"
#include "rise/random.hpp"

namespace rise {

namespace {

constexpr std::size_t kMaxSweeps = 100;

void require_finite(const Matrix& m, const char* what) {
  for (const double x : m.data()) {
    if (!std::isfinite(x)) throw DataError(std::string(what) + " has a non-finite entry");
  }
}

double max_off_diagonal(const Matrix& a) {
  double off = 0.0;
  for (std::size_t p = 0; p < a.rows(); ++p) {
    for (std::size_t q = p + 1; q < a.cols(); ++q) off = std::max(off, std::abs(a(p, q)));
  }
  return off;
}

// Rotate rows/columns p and q of the symmetric matrix `a` so that a(p, q)
// vanishes, accumulating the rotation into `v`.
void jacobi_rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  double t;
  if (std::abs(theta) > 1e150) {
    t = 0.5 / theta;
  } else {
    t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  }
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const std::size_t d = a.rows();

  for (std::size_t r = 0; r < d; ++r) {
    if (r == p || r == q) continue;
    const double arp = a(r, p);
    const double arq = a(r, q);
    const double new_rp = c * arp - s * arq;
    const double new_rq = s * arp + c * arq;
    a(r, p) = new_rp;
    a(p, r) = new_rp;
    a(r, q) = new_rq;
    a(q, r) = new_rq;
  }
  a(p, p) -= t * apq;
  a(q, q) += t * apq;
  a(p, q) = 0.0;
  a(q, p) = 0.0;

  for (std::size_t r = 0; r < d; ++r) {
    const double vrp = v(r, p);
    const double vrq = v(r, q);
    v(r, p) = c * vrp - s * vrq;
    v(r, q) = s * vrp + c * vrq;
  }
}

void normalize_column(Matrix& q, std::size_t j, double norm) {
  for (std::size_t r = 0; r < q.rows(); ++r) q(r, j) /= norm;
}

double column_norm(const Matrix& q, std::size_t j) {
  double s = 0.0;
  for (std::size_t r = 0; r < q.rows(); ++r) s += q(r, j) * q(r, j);
  return std::sqrt(s);
}

// Two passes of modified Gram-Schmidt of column j against columns [0, j).
void project_out_previous(Matrix& q, std::size_t j) {
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t i = 0; i < j; ++i) {
      double dot = 0.0;
      for (std::size_t r = 0; r < q.rows(); ++r) dot += q(r, i) * q(r, j);
      for (std::size_t r = 0; r < q.rows(); ++r) q(r, j) -= dot * q(r, i);
    }
  }
}

}  // namespace

SymEig sym_eigh(const Matrix& s) {
  if (s.rows() != s.cols()) throw ArgumentError("sym_eigh: matrix is not square");
  if (s.rows() == 0) throw ArgumentError("sym_eigh: empty matrix");
  require_finite(s, "sym_eigh input");

  const std::size_t d = s.rows();
  double scale = 1.0;
  for (const double x : s.data()) scale = std::max(scale, std::abs(x));
  Matrix a(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (std::abs(s(i, j) - s(j, i)) > 1e-9 * scale) {
        throw ArgumentError("sym_eigh: matrix is not symmetric");
      }
      a(i, j) = 0.5 * (s(i, j) + s(j, i));
    }
  }

  Matrix v = Matrix::identity(d);
  const double fro = std::sqrt(frobenius_norm_sq(a));
  const double tol = 1e-12 * fro;

  bool converged = max_off_diagonal(a) < tol || fro == 0.0;
  for (std::size_t sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    for (std::size_t p = 0; p + 1 < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) jacobi_rotate(a, v, p, q);
    }
    converged = max_off_diagonal(a) < tol;
  }
  if (!converged) {
    throw ConvergenceError("sym_eigh: off-diagonal residual above tolerance after " +
                           std::to_string(kMaxSweeps) + " sweeps");
  }

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

  SymEig out{std::vector<double>(d), Matrix(d, d)};
  for (std::size_t j = 0; j < d; ++j) {
    out.values[j] = a(order[j], order[j]);
    for (std::size_t r = 0; r < d; ++r) out.vectors(r, j) = v(r, order[j]);
  }
  return out;
}

Matrix gram(const Matrix& z) {
  const std::size_t d = z.cols();
  Matrix g(d, d);
  for (std::size_t r = 0; r < z.rows(); ++r) {
    const auto row = z.row(r);
    for (std::size_t i = 0; i < d; ++i) {
      const double zi = row[i];
      if (zi == 0.0) continue;
      double* gi = &g(i, 0);
      for (std::size_t j = i; j < d; ++j) gi[j] += zi * row[j];
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
  }
  return g;
}

TruncatedSvd trunc_svd_left_from_gram(const Matrix& g, std::size_t n, std::size_t k,
                                      const std::function<Matrix(const Matrix&)>& apply_z,
                                      std::uint64_t seed) {
  const std::size_t d = g.rows();
  if (k == 0) throw ArgumentError("trunc_svd_left: k must be at least 1");
  if (k > d) {
    throw ArgumentError("trunc_svd_left: k=" + std::to_string(k) + " exceeds the " +
                        std::to_string(d) + " available columns");
  }
  if (k > n) {
    throw ArgumentError("trunc_svd_left: k=" + std::to_string(k) + " exceeds the " +
                        std::to_string(n) + " rows");
  }

  const SymEig eig = sym_eigh(g);
  std::vector<double> sigma(k);
  for (std::size_t j = 0; j < k; ++j) sigma[j] = std::sqrt(std::max(eig.values[j], 0.0));
  const double sigma_max = std::sqrt(std::max(eig.values.front(), 0.0));

  Matrix top(d, k);
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t j = 0; j < k; ++j) top(r, j) = eig.vectors(r, j);
  }
  Matrix u = apply_z(top);
  if (u.rows() != n || u.cols() != k) {
    throw ContractViolation("trunc_svd_left: Z * V has the wrong shape");
  }

  for (std::size_t j = 0; j < k; ++j) {
    if (sigma_max > 0.0 && sigma[j] > kRankTolerance * sigma_max) {
      normalize_column(u, j, sigma[j]);
    } else {
      sigma[j] = 0.0;
      for (std::size_t r = 0; r < n; ++r) u(r, j) = 0.0;
    }
  }
  // Columns from eigenvalues near the rounding floor of the Gram matrix lose
  // orthogonality; a re-orthonormalization pass restores it.
  orthonormalize_columns(u, seed);
  canonicalize_signs(u);
  return {std::move(u), std::move(sigma)};
}

TruncatedSvd trunc_svd_left(const Matrix& z, std::size_t k, std::uint64_t seed) {
  require_finite(z, "trunc_svd_left input");
  return trunc_svd_left_from_gram(
      gram(z), z.rows(), k, [&](const Matrix& v) { return matmul(z, v); }, seed);
}

void orthonormalize_columns(Matrix& q, std::uint64_t seed, double drop_tol) {
  const std::size_t n = q.rows();
  if (q.cols() > n) throw ArgumentError("orthonormalize_columns: more columns than rows");
  for (std::size_t j = 0; j < q.cols(); ++j) {
    const double before = column_norm(q, j);
    double after = 0.0;
    if (before > 0.0) {
      project_out_previous(q, j);
      after = column_norm(q, j);
    }
    if (before > 0.0 && after > drop_tol * before) {
      normalize_column(q, j, after);
      continue;
    }
    Rng rng(derive_seed(seed, j));
    for (std::size_t attempt = 0;; ++attempt) {
      if (attempt == 64) throw ConvergenceError("orthonormalize_columns: completion failed");
      for (std::size_t r = 0; r < n; ++r) q(r, j) = rng.normal();
      const double raw = column_norm(q, j);
      project_out_previous(q, j);
      const double kept = column_norm(q, j);
      if (kept > 1e-6 * raw) {
        normalize_column(q, j, kept);
        break;
      }
    }
  }
}

void canonicalize_signs(Matrix& q) {
  for (std::size_t j = 0; j < q.cols(); ++j) {
    for (std::size_t r = 0; r < q.rows(); ++r) {
      if (q(r, j) == 0.0) continue;
      if (q(r, j) < 0.0) {
        for (std::size_t i = 0; i < q.rows(); ++i) q(i, j) = -q(i, j);
      }
      break;
    }
  }
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) t(c, r) = a(r, c);
  }
  return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw ArgumentError("matmul: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto out = c.row(r);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double x = a(r, i);
      if (x == 0.0) continue;
      const auto brow = b.row(i);
      for (std::size_t j = 0; j < b.cols(); ++j) out[j] += x * brow[j];
    }
  }
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw ArgumentError("matmul_tn: row counts differ");
  Matrix c(a.cols(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const auto arow = a.row(r);
    const auto brow = b.row(r);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double x = arow[i];
      if (x == 0.0) continue;
      auto out = c.row(i);
      for (std::size_t j = 0; j < b.cols(); ++j) out[j] += x * brow[j];
    }
  }
  return c;
}

Matrix hcat(std::span<const Matrix> blocks) {
  if (blocks.empty()) return {};
  const std::size_t n = blocks.front().rows();
  std::size_t width = 0;
  for (const auto& b : blocks) {
    if (b.rows() != n) throw ArgumentError("hcat: blocks have different row counts");
    width += b.cols();
  }
  Matrix out(n, width);
  for (std::size_t r = 0; r < n; ++r) {
    auto dst = out.row(r).begin();
    for (const auto& b : blocks) dst = std::copy(b.row(r).begin(), b.row(r).end(), dst);
  }
  return out;
}

double frobenius_norm_sq(const Matrix& a) {
  double s = 0.0;
  for (const double x : a.data()) s += x * x;
  return s;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ArgumentError("max_abs_diff: shapes differ");
  }
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

double orthonormality_error(const Matrix& q) {
  const Matrix g = gram(q);
  double m = 0.0;
  for (std::size_t i = 0; i < g.rows(); ++i) {
    for (std::size_t j = 0; j < g.cols(); ++j) {
      m = std::max(m, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
    }
  }
  return m;
}

}  // namespace rise
