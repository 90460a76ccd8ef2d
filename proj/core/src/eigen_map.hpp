#pragma once

#include <span>

#include <Eigen/Dense>

#include "wls/dense_matrix.hpp"

namespace wls::detail {

using MatMap = Eigen::Map<Eigen::MatrixXd>;
using ConstMatMap = Eigen::Map<const Eigen::MatrixXd>;
using VecMap = Eigen::Map<Eigen::VectorXd>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;

inline ConstMatMap view(const DenseMatrix& a) {
  return {a.data(), a.rows(), a.cols()};
}
inline MatMap view(DenseMatrix& a) { return {a.data(), a.rows(), a.cols()}; }

inline ConstVecMap view(std::span<const double> v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}
inline VecMap view(std::span<double> v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

template <typename Derived>
DenseMatrix to_dense(const Eigen::MatrixBase<Derived>& m) {
  DenseMatrix out(m.rows(), m.cols());
  view(out) = m;
  return out;
}

}  // namespace wls::detail
