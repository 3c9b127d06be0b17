#pragma once

// Test-side helpers. The Eigen routines here are the independent oracles the
// library results are checked against; none of them call into godec's own
// SVD/QR.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "godec/matcore.hpp"
#include "godec/matrix.hpp"

namespace godec::test {

inline Eigen::MatrixXd to_eigen(const DenseMatrix& m) {
  Eigen::MatrixXd e(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(Eigen::Index(i), Eigen::Index(j)) = m(i, j);
  return e;
}

inline DenseMatrix from_eigen(const Eigen::MatrixXd& e) {
  DenseMatrix m(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j) m(std::size_t(i), std::size_t(j)) = e(i, j);
  return m;
}

inline DenseMatrix randn(std::size_t m, std::size_t n, std::uint64_t seed, double scale = 1.0) {
  return gaussian_matrix(m, n, scale, RngSeed{seed, "test"});
}

// Standard-library RNG for oracle-side randomness, kept apart from the
// library's generator.
inline Eigen::MatrixXd std_randn(Eigen::Index m, Eigen::Index n, std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd a(m, n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = nd(gen);
  return a;
}

inline Eigen::VectorXd eigen_singular_values(const DenseMatrix& m) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(to_eigen(m)).singularValues();
}

inline double eigen_spectral_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
}

inline Eigen::MatrixXd eigen_pinv(const Eigen::MatrixXd& m) {
  return Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(m).pseudoInverse();
}

// Best rank-r approximation via Eigen's SVD.
inline Eigen::MatrixXd eigen_truncate(const Eigen::MatrixXd& a, Eigen::Index r) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU().leftCols(r) * svd.singularValues().head(r).asDiagonal() *
         svd.matrixV().leftCols(r).transpose();
}

inline double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a.data()[i] - b.data()[i]));
  return d;
}

inline double rel_fro(const DenseMatrix& a, const DenseMatrix& ref) {
  return (a - ref).frobenius_norm() / ref.frobenius_norm();
}

inline DenseMatrix hilbert(std::size_t n) {
  DenseMatrix h(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h(i, j) = 1.0 / static_cast<double>(i + j + 1);
  return h;
}

}  // namespace godec::test
