#include "godec/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "godec/error.hpp"

namespace godec {

namespace {

constexpr double kJacobiTol = 1e-12;
constexpr int kMaxSweeps = 80;

double dot(const double* a, const double* b, std::size_t n) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

// One-sided Jacobi on the columns of a square-or-tall matrix whose columns are
// stored as the rows of `cols` (n rows of length m). On return the rows of
// `cols` are mutually orthogonal and vcols(j, :) is column j of V.
void jacobi_sweeps(DenseMatrix& cols, DenseMatrix& vcols) {
  const std::size_t n = cols.rows();
  const std::size_t m = cols.cols();
  std::vector<double> norms(n);
  for (std::size_t j = 0; j < n; ++j) norms[j] = dot(&cols(j, 0), &cols(j, 0), m);

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double alpha = norms[p];
        const double beta = norms[q];
        if (alpha <= std::numeric_limits<double>::min() || beta <= std::numeric_limits<double>::min()) continue;
        double* wp = &cols(p, 0);
        double* wq = &cols(q, 0);
        const double gamma = dot(wp, wq, m);
        if (std::abs(gamma) <= kJacobiTol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double a = wp[i];
          const double b = wq[i];
          wp[i] = c * a - s * b;
          wq[i] = s * a + c * b;
        }
        double* vp = &vcols(p, 0);
        double* vq = &vcols(q, 0);
        for (std::size_t i = 0; i < n; ++i) {
          const double a = vp[i];
          const double b = vq[i];
          vp[i] = c * a - s * b;
          vq[i] = s * a + c * b;
        }
        norms[p] = dot(wp, wp, m);
        norms[q] = dot(wq, wq, m);
      }
    }
    if (!rotated) break;
  }
}

// Replaces the listed rows of `basis` (rows are vectors of length dim) with
// unit vectors orthogonal to every other row, using canonical directions.
void complete_orthonormal(DenseMatrix& basis, const std::vector<bool>& missing) {
  const std::size_t dim = basis.cols();
  std::size_t next_axis = 0;
  for (std::size_t j = 0; j < basis.rows(); ++j) {
    if (!missing[j]) continue;
    for (; next_axis < dim; ++next_axis) {
      std::vector<double> cand(dim, 0.0);
      cand[next_axis] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t k = 0; k < basis.rows(); ++k) {
          if (k == j || (missing[k] && k > j)) continue;
          const double proj = dot(cand.data(), &basis(k, 0), dim);
          for (std::size_t i = 0; i < dim; ++i) cand[i] -= proj * basis(k, i);
        }
      }
      const double nrm = std::sqrt(dot(cand.data(), cand.data(), dim));
      if (nrm > 1e-6) {
        for (std::size_t i = 0; i < dim; ++i) basis(j, i) = cand[i] / nrm;
        ++next_axis;
        break;
      }
    }
  }
}

// SVD of a square or tall matrix (rows ≥ cols), returned with u as m×n.
SvdFactors svd_tall(const DenseMatrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();

  DenseMatrix q_outer;
  DenseMatrix work;
  if (m > n) {
    QrFactors qr = qr_thin(a);
    q_outer = std::move(qr.q);
    work = qr.r.transpose();  // rows of `work` are columns of R
  } else {
    work = a.transpose();
  }
  DenseMatrix vcols = DenseMatrix::identity(n);
  jacobi_sweeps(work, vcols);

  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) sigma[j] = std::sqrt(dot(&work(j, 0), &work(j, 0), work.cols()));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  const std::size_t inner = work.cols();
  DenseMatrix ucols(n, inner);
  DenseMatrix v(n, n);
  std::vector<double> sorted(n);
  std::vector<bool> missing(n, false);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    sorted[k] = sigma[j];
    if (sigma[j] > std::numeric_limits<double>::min()) {
      for (std::size_t i = 0; i < inner; ++i) ucols(k, i) = work(j, i) / sigma[j];
    } else {
      sorted[k] = 0.0;
      missing[k] = true;
    }
    for (std::size_t i = 0; i < n; ++i) v(i, k) = vcols(j, i);
  }
  if (std::find(missing.begin(), missing.end(), true) != missing.end()) complete_orthonormal(ucols, missing);

  SvdFactors f;
  f.sigma = std::move(sorted);
  f.v = std::move(v);
  f.u = (m > n) ? matmul_nt(q_outer, ucols) : ucols.transpose();
  return f;
}

}  // namespace

DenseMatrix SvdFactors::reconstruct() const {
  return matmul_nt(scale_columns(u, sigma), v);
}

DenseMatrix gaussian_matrix(std::size_t m, std::size_t n, double scale, const RngSeed& seed) {
  if (m == 0 || n == 0) throw DimensionError("gaussian_matrix: zero dimension");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ParameterError("gaussian_matrix: scale must be > 0");
  RandomStream rng(seed);
  std::vector<double> data(m * n);
  for (double& v : data) v = scale * rng.normal();
  return {m, n, std::move(data)};
}

QrFactors qr_thin(const DenseMatrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (m < n) throw DimensionError("qr_thin: rows < cols");

  DenseMatrix work = a;
  // Householder vectors, stored per column (length m - k), and their τ.
  std::vector<std::vector<double>> vs(n);
  std::vector<double> taus(n, 0.0);
  std::vector<double> w(n);

  for (std::size_t k = 0; k < n; ++k) {
    double sub = 0.0;
    for (std::size_t i = k + 1; i < m; ++i) sub += work(i, k) * work(i, k);
    if (sub == 0.0) continue;  // already upper triangular in this column
    const double x0 = work(k, k);
    const double nrm = std::sqrt(x0 * x0 + sub);
    const double alpha = x0 >= 0.0 ? -nrm : nrm;
    std::vector<double>& v = vs[k];
    v.assign(m - k, 0.0);
    v[0] = x0 - alpha;
    for (std::size_t i = k + 1; i < m; ++i) v[i - k] = work(i, k);
    const double vtv = v[0] * v[0] + sub;
    const double tau = 2.0 / vtv;
    taus[k] = tau;

    std::fill(w.begin() + static_cast<std::ptrdiff_t>(k), w.end(), 0.0);
    for (std::size_t i = k; i < m; ++i) {
      const double vi = v[i - k];
      const double* row = &work(i, 0);
      for (std::size_t j = k; j < n; ++j) w[j] += vi * row[j];
    }
    for (std::size_t i = k; i < m; ++i) {
      const double vi = tau * v[i - k];
      double* row = &work(i, 0);
      for (std::size_t j = k; j < n; ++j) row[j] -= vi * w[j];
    }
    work(k, k) = alpha;
    for (std::size_t i = k + 1; i < m; ++i) work(i, k) = 0.0;
  }

  QrFactors out;
  out.r = DenseMatrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) out.r(i, j) = work(i, j);

  // Q = H_0 H_1 ... H_{n-1} [I_n; 0], applied right to left.
  DenseMatrix q(m, n);
  for (std::size_t i = 0; i < n; ++i) q(i, i) = 1.0;
  for (std::size_t kk = n; kk-- > 0;) {
    if (taus[kk] == 0.0) continue;
    const std::vector<double>& v = vs[kk];
    std::fill(w.begin(), w.end(), 0.0);
    for (std::size_t i = kk; i < m; ++i) {
      const double vi = v[i - kk];
      const double* row = &q(i, 0);
      for (std::size_t j = kk; j < n; ++j) w[j] += vi * row[j];
    }
    for (std::size_t i = kk; i < m; ++i) {
      const double vi = taus[kk] * v[i - kk];
      double* row = &q(i, 0);
      for (std::size_t j = kk; j < n; ++j) row[j] -= vi * w[j];
    }
  }

  for (std::size_t k = 0; k < n; ++k) {
    if (out.r(k, k) >= 0.0) continue;
    for (std::size_t j = k; j < n; ++j) out.r(k, j) = -out.r(k, j);
    for (std::size_t i = 0; i < m; ++i) q(i, k) = -q(i, k);
  }
  out.q = std::move(q);
  ensure_finite(out.q, "qr_thin");
  ensure_finite(out.r, "qr_thin");
  return out;
}

SvdFactors svd_full(const DenseMatrix& a) {
  ensure_finite(a, "svd_full");
  if (a.empty()) throw DimensionError("svd_full: empty matrix");
  if (a.rows() >= a.cols()) return svd_tall(a);
  SvdFactors t = svd_tall(a.transpose());
  std::swap(t.u, t.v);
  return t;
}

DenseMatrix svd_truncate(const SvdFactors& f, std::size_t r) {
  if (r < 1 || r > f.sigma.size()) {
    throw ParameterError("svd_truncate: rank " + std::to_string(r) + " outside [1, " +
                         std::to_string(f.sigma.size()) + "]");
  }
  const DenseMatrix ur = f.u.col_range(0, r);
  const DenseMatrix vr = f.v.col_range(0, r);
  return matmul_nt(scale_columns(ur, std::span<const double>(f.sigma).first(r)), vr);
}

DenseMatrix svd_truncate(const DenseMatrix& a, std::size_t r) {
  if (r < 1 || r > std::min(a.rows(), a.cols())) {
    throw ParameterError("svd_truncate: rank " + std::to_string(r) + " out of range");
  }
  return svd_truncate(svd_full(a), r);
}

DenseMatrix hard_threshold_entries(const DenseMatrix& x, std::size_t k) {
  const std::size_t total = x.size();
  if (k > total) throw ParameterError("hard_threshold_entries: k exceeds entry count");
  DenseMatrix out(x.rows(), x.cols());
  if (k == 0) return out;
  const auto src = x.data();
  auto dst = out.data();
  if (k == total) {
    std::copy(src.begin(), src.end(), dst.begin());
    return out;
  }
  std::vector<std::size_t> idx(total);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  auto larger = [&](std::size_t a, std::size_t b) {
    const double fa = std::abs(src[a]);
    const double fb = std::abs(src[b]);
    return fa > fb || (fa == fb && a < b);
  };
  std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k - 1), idx.end(), larger);
  for (std::size_t i = 0; i < k; ++i) dst[idx[i]] = src[idx[i]];
  return out;
}

double soft_threshold(double x, double lambda) noexcept {
  const double mag = std::abs(x) - lambda;
  return mag > 0.0 ? std::copysign(mag, x) : 0.0;
}

DenseMatrix soft_threshold(const DenseMatrix& x, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ParameterError("soft_threshold: lambda must be >= 0");
  DenseMatrix out(x.rows(), x.cols());
  const auto src = x.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = soft_threshold(src[i], lambda);
  return out;
}

double rel_error(const DenseMatrix& x, const DenseMatrix& xhat) {
  ensure_same_shape(x, xhat, "rel_error");
  const double denom = x.squared_norm();
  if (denom == 0.0) throw ParameterError("rel_error: reference matrix is zero");
  double num = 0.0;
  const auto a = x.data();
  const auto b = xhat.data();
  for (std::size_t i = 0; i < a.size(); ++i) num += (a[i] - b[i]) * (a[i] - b[i]);
  return num / denom;
}

double spectral_norm(const DenseMatrix& a) {
  if (a.empty()) return 0.0;
  return svd_full(a).sigma.front();
}

std::size_t numerical_rank(const std::vector<double>& sigma, double rel_tol) {
  if (sigma.empty() || sigma.front() <= 0.0) return 0;
  const double cut = rel_tol * sigma.front();
  return static_cast<std::size_t>(std::count_if(sigma.begin(), sigma.end(), [&](double s) { return s > cut; }));
}

std::size_t numerical_rank(const DenseMatrix& a, double rel_tol) {
  if (a.empty()) return 0;
  return numerical_rank(svd_full(a).sigma, rel_tol);
}

DenseMatrix pseudo_inverse(const DenseMatrix& a, double rel_cutoff) {
  const SvdFactors f = svd_full(a);
  const std::size_t keep = numerical_rank(f.sigma, rel_cutoff);
  if (keep == 0) return DenseMatrix(a.cols(), a.rows());
  std::vector<double> inv(keep);
  for (std::size_t i = 0; i < keep; ++i) inv[i] = 1.0 / f.sigma[i];
  return matmul_nt(scale_columns(f.v.col_range(0, keep), inv), f.u.col_range(0, keep));
}

double orthonormality_error(const DenseMatrix& q) {
  const DenseMatrix g = matmul_tn(q, q);
  double err = 0.0;
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) err = std::max(err, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
  return err;
}

}  // namespace godec
