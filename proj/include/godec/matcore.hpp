#pragma once

#include <cstddef>
#include <vector>

#include "godec/matrix.hpp"
#include "godec/rng.hpp"

namespace godec {

// Thin SVD a = u · diag(sigma) · vᵀ with p = min(rows, cols).
// u and v have orthonormal columns (completed with an orthonormal basis
// where sigma is zero); sigma is nonincreasing and nonnegative.
struct SvdFactors {
  DenseMatrix u;
  std::vector<double> sigma;
  DenseMatrix v;

  DenseMatrix reconstruct() const;
};

struct QrFactors {
  DenseMatrix q;  // rows × cols, orthonormal columns
  DenseMatrix r;  // cols × cols, upper triangular, nonnegative diagonal
};

// m × n matrix with i.i.d. Normal(0, scale²) entries drawn from `seed`.
DenseMatrix gaussian_matrix(std::size_t m, std::size_t n, double scale, const RngSeed& seed);

// Householder QR of a tall (rows ≥ cols) matrix.
QrFactors qr_thin(const DenseMatrix& a);

// One-sided Jacobi SVD. Tall inputs are first reduced with qr_thin and the
// sweeps run on the square triangular factor.
SvdFactors svd_full(const DenseMatrix& a);

// Best rank-r approximation Σᵢ₌₁ʳ σᵢuᵢvᵢᵀ (1 ≤ r ≤ min(rows, cols)).
DenseMatrix svd_truncate(const DenseMatrix& a, std::size_t r);
DenseMatrix svd_truncate(const SvdFactors& f, std::size_t r);

// Keeps the k largest-magnitude entries, zeros elsewhere. Ties go to the
// earlier row-major index.
DenseMatrix hard_threshold_entries(const DenseMatrix& x, std::size_t k);

// Entrywise sgn(x)·max(|x| − λ, 0).
DenseMatrix soft_threshold(const DenseMatrix& x, double lambda);
double soft_threshold(double x, double lambda) noexcept;

// ‖x − xhat‖²_F / ‖x‖²_F.
double rel_error(const DenseMatrix& x, const DenseMatrix& xhat);

// Largest singular value.
double spectral_norm(const DenseMatrix& a);

// Count of singular values above rel_tol · σ₁ (0 for the zero matrix).
std::size_t numerical_rank(const DenseMatrix& a, double rel_tol = 1e-10);
std::size_t numerical_rank(const std::vector<double>& sigma, double rel_tol);

// Moore–Penrose pseudo-inverse via svd_full, dropping σᵢ ≤ rel_cutoff · σ₁.
DenseMatrix pseudo_inverse(const DenseMatrix& a, double rel_cutoff = 1e-12);

// max |qᵀq − I|.
double orthonormality_error(const DenseMatrix& q);

}  // namespace godec
