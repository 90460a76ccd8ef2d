#include "wls/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "eigen_map.hpp"
#include "wls/errors.hpp"

namespace wls {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::string shape(const DenseMatrix& a) {
  return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

double max_abs(const DenseMatrix& a) {
  double out = 0.0;
  for (double v : a.values()) out = std::max(out, std::abs(v));
  return out;
}

double norm1(const DenseMatrix& a) {
  double out = 0.0;
  for (Index j = 0; j < a.cols(); ++j) {
    double s = 0.0;
    for (double v : a.col(j)) s += std::abs(v);
    out = std::max(out, s);
  }
  return out;
}

void check_triangular_operands(const DenseMatrix& r, Index rhs_rows) {
  if (r.rows() != r.cols()) {
    throw DimensionMismatch("solve_upper_triangular: R must be square, got " +
                            shape(r));
  }
  if (rhs_rows != r.rows()) {
    throw DimensionMismatch("solve_upper_triangular: R is " + shape(r) +
                            " but right-hand side has " +
                            std::to_string(rhs_rows) + " rows");
  }
  for (Index i = 0; i < r.rows(); ++i) {
    if (r(i, i) == 0.0) {
      throw Singular("solve_upper_triangular: zero diagonal entry at " +
                     std::to_string(i));
    }
  }
}

}  // namespace

DenseMatrix mat_mul(const DenseMatrix& a, const DenseMatrix& b,
                    Transpose transpose_a) {
  const bool t = transpose_a == Transpose::yes;
  const Index inner = t ? a.rows() : a.cols();
  if (inner != b.rows()) {
    throw DimensionMismatch(std::string("mat_mul: ") + (t ? "A^T" : "A") +
                            " with A " + shape(a) + " times " + shape(b));
  }
  DenseMatrix out(t ? a.cols() : a.rows(), b.cols());
  if (t) {
    detail::view(out).noalias() = detail::view(a).transpose() * detail::view(b);
  } else {
    detail::view(out).noalias() = detail::view(a) * detail::view(b);
  }
  return out;
}

Vector mat_vec(const DenseMatrix& a, std::span<const double> x,
               Transpose transpose_a) {
  const bool t = transpose_a == Transpose::yes;
  const Index inner = t ? a.rows() : a.cols();
  if (inner != static_cast<Index>(x.size())) {
    throw DimensionMismatch("mat_vec: A " + shape(a) + " with vector of length " +
                            std::to_string(x.size()));
  }
  Vector out(static_cast<std::size_t>(t ? a.cols() : a.rows()));
  if (t) {
    detail::view(std::span<double>(out)).noalias() =
        detail::view(a).transpose() * detail::view(x);
  } else {
    detail::view(std::span<double>(out)).noalias() =
        detail::view(a) * detail::view(x);
  }
  return out;
}

QRFactors qr_thin(const DenseMatrix& a, std::optional<double> rank_tol) {
  const Index m = a.rows();
  const Index n = a.cols();
  if (a.empty() || m < n) {
    throw DimensionMismatch("qr_thin: need a tall matrix (m >= n), got " +
                            shape(a));
  }
  const double tol = rank_tol.value_or(static_cast<double>(m) * kEps);

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(detail::view(a));
  const auto& packed = qr.matrixQR();

  QRFactors f{DenseMatrix(m, n), DenseMatrix(n, n)};
  detail::view(f.r) =
      packed.topRows(n).triangularView<Eigen::Upper>().toDenseMatrix();

  double rmax = 0.0;
  for (Index i = 0; i < n; ++i) rmax = std::max(rmax, std::abs(f.r(i, i)));
  for (Index i = 0; i < n; ++i) {
    if (std::abs(f.r(i, i)) <= tol * rmax) {
      throw RankDeficient("qr_thin: |R(" + std::to_string(i) + "," +
                          std::to_string(i) + ")| = " +
                          std::to_string(std::abs(f.r(i, i))) +
                          " is below rank tolerance for " + shape(a));
    }
  }

  auto q = detail::view(f.q);
  q.setIdentity();
  q.applyOnTheLeft(qr.householderQ());

  for (Index j = 0; j < n; ++j) {
    if (f.r(j, j) < 0.0) {
      for (Index k = j; k < n; ++k) f.r(j, k) = -f.r(j, k);
      for (double& v : f.q.col(j)) v = -v;
    }
  }
  return f;
}

DenseMatrix solve_upper_triangular(const DenseMatrix& r, const DenseMatrix& b,
                                   Transpose transpose) {
  check_triangular_operands(r, b.rows());
  DenseMatrix x = b;
  auto xv = detail::view(x);
  if (transpose == Transpose::yes) {
    detail::view(r).transpose().triangularView<Eigen::Lower>().solveInPlace(xv);
  } else {
    detail::view(r).triangularView<Eigen::Upper>().solveInPlace(xv);
  }
  return x;
}

void solve_upper_triangular_inplace(const DenseMatrix& r, std::span<double> x,
                                    Transpose transpose) {
  check_triangular_operands(r, static_cast<Index>(x.size()));
  auto xv = detail::view(x);
  if (transpose == Transpose::yes) {
    detail::view(r).transpose().triangularView<Eigen::Lower>().solveInPlace(xv);
  } else {
    detail::view(r).triangularView<Eigen::Upper>().solveInPlace(xv);
  }
}

LuFactors::LuFactors(const DenseMatrix& c, std::optional<double> pivot_tol)
    : lu_(c) {
  const Index p = c.rows();
  if (c.empty() || p != c.cols()) {
    throw DimensionMismatch("LuFactors: need a square matrix, got " + shape(c));
  }
  const double tol = pivot_tol.value_or(static_cast<double>(p) * kEps);
  const double cmax = max_abs(c);
  if (!(cmax > 0.0)) {
    throw SingularCapacitance("LuFactors: zero matrix", 0.0);
  }

  pivots_.resize(static_cast<std::size_t>(p));
  for (Index k = 0; k < p; ++k) {
    Index piv = k;
    double best = std::abs(lu_(k, k));
    for (Index i = k + 1; i < p; ++i) {
      if (std::abs(lu_(i, k)) > best) {
        best = std::abs(lu_(i, k));
        piv = i;
      }
    }
    pivots_[static_cast<std::size_t>(k)] = piv;
    if (best <= tol * cmax) {
      throw SingularCapacitance("LuFactors: pivot " + std::to_string(k) +
                                    " below tolerance (|pivot| = " +
                                    std::to_string(best) + ")",
                                0.0);
    }
    if (piv != k) {
      for (Index j = 0; j < p; ++j) std::swap(lu_(k, j), lu_(piv, j));
    }
    const double inv = 1.0 / lu_(k, k);
    for (Index i = k + 1; i < p; ++i) lu_(i, k) *= inv;
    for (Index j = k + 1; j < p; ++j) {
      const double ukj = lu_(k, j);
      if (ukj == 0.0) continue;
      for (Index i = k + 1; i < p; ++i) lu_(i, j) -= lu_(i, k) * ukj;
    }
  }

  const DenseMatrix inverse = solve(DenseMatrix::identity(p));
  rcond_ = 1.0 / (norm1(c) * norm1(inverse));
  if (!std::isfinite(rcond_) || rcond_ <= 0.0) {
    throw SingularCapacitance("LuFactors: inverse is not finite", 0.0);
  }
  rcond_ = std::min(rcond_, 1.0);
}

void LuFactors::solve_inplace(std::span<double> x) const {
  const Index p = lu_.rows();
  if (static_cast<Index>(x.size()) != p) {
    throw DimensionMismatch("LuFactors::solve: right-hand side length " +
                            std::to_string(x.size()) + ", expected " +
                            std::to_string(p));
  }
  for (Index k = 0; k < p; ++k) {
    const Index piv = pivots_[static_cast<std::size_t>(k)];
    if (piv != k) std::swap(x[k], x[piv]);
  }
  for (Index j = 0; j < p; ++j) {
    const double xj = x[j];
    if (xj == 0.0) continue;
    for (Index i = j + 1; i < p; ++i) x[i] -= lu_(i, j) * xj;
  }
  for (Index j = p - 1; j >= 0; --j) {
    x[j] /= lu_(j, j);
    const double xj = x[j];
    if (xj == 0.0) continue;
    for (Index i = 0; i < j; ++i) x[i] -= lu_(i, j) * xj;
  }
}

DenseMatrix LuFactors::solve(const DenseMatrix& b) const {
  if (b.rows() != lu_.rows()) {
    throw DimensionMismatch("LuFactors::solve: right-hand side is " + shape(b) +
                            ", expected " + std::to_string(lu_.rows()) +
                            " rows");
  }
  DenseMatrix x = b;
  for (Index j = 0; j < x.cols(); ++j) solve_inplace(x.col(j));
  return x;
}

LuSolution lu_solve(const DenseMatrix& c, const DenseMatrix& b) {
  LuFactors lu(c);
  return {lu.solve(b), lu.rcond()};
}

DenseMatrix pinv_oracle(const DenseMatrix& a) {
  const QRFactors f = qr_thin(a);
  return solve_upper_triangular(f.r, transpose(f.q));
}

Vector singular_values(const DenseMatrix& a) {
  if (a.empty()) return {};
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(detail::view(a));
  const auto& s = svd.singularValues();
  return Vector(s.data(), s.data() + s.size());
}

Index numerical_rank(const DenseMatrix& a, double tol) {
  if (!(tol >= 0.0)) {
    throw std::invalid_argument("numerical_rank: tol must be nonnegative");
  }
  const Vector s = singular_values(a);
  if (s.empty() || !(s.front() > 0.0)) return 0;
  const double cut = tol * s.front();
  return static_cast<Index>(
      std::count_if(s.begin(), s.end(), [cut](double v) { return v > cut; }));
}

}  // namespace wls
