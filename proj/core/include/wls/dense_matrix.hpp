#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace wls {

using Index = std::ptrdiff_t;
using Vector = std::vector<double>;

/**
 * Dense real matrix in column-major order.
 *
 * Entry (i, j) lives at values()[i + j * rows()]. Column j is therefore a
 * contiguous span, which is how vectors (m x 1 matrices) and column blocks
 * such as [V, A^T U] are handed around. A default-constructed matrix is empty
 * (0 x 0); every other constructor requires rows, cols >= 1.
 */
class DenseMatrix {
 public:
  DenseMatrix() = default;

  /// Zero-filled rows x cols matrix.
  DenseMatrix(Index rows, Index cols);

  /// Takes ownership of column-major values; values.size() must be rows*cols.
  DenseMatrix(Index rows, Index cols, std::vector<double> values);

  static DenseMatrix zeros(Index rows, Index cols) { return {rows, cols}; }
  static DenseMatrix identity(Index n);

  /// Row-wise literal, handy for small fixtures: from_rows({{1, 2}, {3, 4}}).
  static DenseMatrix from_rows(
      std::initializer_list<std::initializer_list<double>> rows);

  /// n x 1 matrix holding a copy of v.
  static DenseMatrix column(std::span<const double> v);

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  Index size() const noexcept { return rows_ * cols_; }
  bool empty() const noexcept { return values_.empty(); }

  double operator()(Index i, Index j) const noexcept {
    return values_[static_cast<std::size_t>(i + j * rows_)];
  }
  double& operator()(Index i, Index j) noexcept {
    return values_[static_cast<std::size_t>(i + j * rows_)];
  }

  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  std::span<const double> col(Index j) const noexcept {
    return {values_.data() + j * rows_, static_cast<std::size_t>(rows_)};
  }
  std::span<double> col(Index j) noexcept {
    return {values_.data() + j * rows_, static_cast<std::size_t>(rows_)};
  }

  /// True when every entry is finite.
  bool all_finite() const noexcept;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<double> values_;
};

DenseMatrix transpose(const DenseMatrix& a);
DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator*(double s, const DenseMatrix& a);

double frobenius_norm(const DenseMatrix& a);
double norm2(std::span<const double> v);

}  // namespace wls
