#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

namespace godec {

// Row-major dense real matrix. Entries are finite: construction from data
// and every matcore operation reject NaN/Inf with NonFiniteError.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols);  // zero-filled
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }
  static DenseMatrix identity(std::size_t n);
  static DenseMatrix diagonal(std::span<const double> diag);
  static DenseMatrix diagonal(std::size_t rows, std::size_t cols, std::span<const double> diag);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }
  std::span<const double> row(std::size_t i) const noexcept {
    return std::span<const double>(data_).subspan(i * cols_, cols_);
  }
  std::span<double> row(std::size_t i) noexcept {
    return std::span<double>(data_).subspan(i * cols_, cols_);
  }

  DenseMatrix transpose() const;
  // Rows [r0, r0+nr) and columns [c0, c0+nc).
  DenseMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  DenseMatrix col_range(std::size_t c0, std::size_t nc) const { return block(0, c0, rows_, nc); }
  DenseMatrix row_range(std::size_t r0, std::size_t nr) const { return block(r0, 0, nr, cols_); }

  double frobenius_norm() const noexcept;
  double squared_norm() const noexcept;
  double max_abs() const noexcept;
  std::size_t count_nonzero() const noexcept;
  bool all_finite() const noexcept;

  DenseMatrix& operator+=(const DenseMatrix& other);
  DenseMatrix& operator-=(const DenseMatrix& other);
  DenseMatrix& operator*=(double s) noexcept;

  friend DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
  friend DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
  friend DenseMatrix operator*(DenseMatrix a, double s) noexcept { return a *= s; }
  friend DenseMatrix operator*(double s, DenseMatrix a) noexcept { return a *= s; }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Throws NonFiniteError naming `where` if any entry is NaN/Inf.
void ensure_finite(const DenseMatrix& m, std::string_view where);
// Throws DimensionError unless shapes match.
void ensure_same_shape(const DenseMatrix& a, const DenseMatrix& b, std::string_view where);

// Products, dispatched to a blocked GEMM kernel.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);  // aᵀ·b
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);  // a·bᵀ

// Horizontal / vertical concatenation.
DenseMatrix hstack(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix vstack(const DenseMatrix& a, const DenseMatrix& b);

// a · diag(d), scaling column j by d[j].
DenseMatrix scale_columns(DenseMatrix a, std::span<const double> d);

}  // namespace godec
