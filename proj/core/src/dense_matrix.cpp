#include "wls/dense_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "eigen_map.hpp"
#include "wls/errors.hpp"

namespace wls {

namespace {

void require_positive(Index rows, Index cols) {
  if (rows < 1 || cols < 1) {
    throw DimensionMismatch("DenseMatrix: dimensions must be positive, got " +
                            std::to_string(rows) + "x" + std::to_string(cols));
  }
}

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b,
                        const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch(std::string(op) + ": shape " +
                            std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + " vs " +
                            std::to_string(b.rows()) + "x" +
                            std::to_string(b.cols()));
  }
}

}  // namespace

DenseMatrix::DenseMatrix(Index rows, Index cols) : rows_(rows), cols_(cols) {
  require_positive(rows, cols);
  values_.assign(static_cast<std::size_t>(rows * cols), 0.0);
}

DenseMatrix::DenseMatrix(Index rows, Index cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  require_positive(rows, cols);
  if (values_.size() != static_cast<std::size_t>(rows * cols)) {
    throw DimensionMismatch("DenseMatrix: expected " +
                            std::to_string(rows * cols) + " values, got " +
                            std::to_string(values_.size()));
  }
}

DenseMatrix DenseMatrix::identity(Index n) {
  DenseMatrix out(n, n);
  for (Index i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

DenseMatrix DenseMatrix::from_rows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const auto m = static_cast<Index>(rows.size());
  const auto n = m > 0 ? static_cast<Index>(rows.begin()->size()) : 0;
  DenseMatrix out(m, n);
  Index i = 0;
  for (const auto& row : rows) {
    if (static_cast<Index>(row.size()) != n) {
      throw DimensionMismatch("DenseMatrix::from_rows: ragged rows");
    }
    Index j = 0;
    for (double v : row) out(i, j++) = v;
    ++i;
  }
  return out;
}

DenseMatrix DenseMatrix::column(std::span<const double> v) {
  return {static_cast<Index>(v.size()), 1, std::vector<double>(v.begin(), v.end())};
}

bool DenseMatrix::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(),
                     [](double x) { return std::isfinite(x); });
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix out(a.cols(), a.rows());
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i) out(j, i) = a(i, j);
  return out;
}

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "operator+");
  DenseMatrix out = a;
  detail::view(out) += detail::view(b);
  return out;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "operator-");
  DenseMatrix out = a;
  detail::view(out) -= detail::view(b);
  return out;
}

DenseMatrix operator*(double s, const DenseMatrix& a) {
  DenseMatrix out = a;
  detail::view(out) *= s;
  return out;
}

double frobenius_norm(const DenseMatrix& a) {
  if (a.empty()) return 0.0;
  return detail::view(a).norm();
}

double norm2(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return detail::view(v).norm();
}

}  // namespace wls
