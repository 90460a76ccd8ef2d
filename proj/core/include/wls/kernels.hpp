#pragma once

#include <optional>
#include <span>
#include <vector>

#include "wls/dense_matrix.hpp"

namespace wls {

enum class Transpose : bool { no = false, yes = true };

/// op(a) * b with op(a) = a or a^T. Throws DimensionMismatch when the inner
/// dimensions disagree.
DenseMatrix mat_mul(const DenseMatrix& a, const DenseMatrix& b,
                    Transpose transpose_a = Transpose::no);

/// op(a) * x for a vector x.
Vector mat_vec(const DenseMatrix& a, std::span<const double> x,
               Transpose transpose_a = Transpose::no);

/// Thin QR factors A = QR: q is m x n with orthonormal columns, r is n x n
/// upper triangular with a nonnegative diagonal.
struct QRFactors {
  DenseMatrix q;
  DenseMatrix r;
};

/**
 * Householder thin QR of a tall matrix (m >= n). Q is formed explicitly.
 *
 * Signs are normalized so that diag(R) >= 0. The factorization is rejected
 * with RankDeficient when some |R_ii| <= rank_tol * max_j |R_jj|; the default
 * rank_tol is m * eps.
 */
QRFactors qr_thin(const DenseMatrix& a,
                  std::optional<double> rank_tol = std::nullopt);

/// Solves R X = B, or R^T X = B when transpose is set. Throws Singular on a
/// zero diagonal entry.
DenseMatrix solve_upper_triangular(const DenseMatrix& r, const DenseMatrix& b,
                                   Transpose transpose = Transpose::no);

/// In-place vector variant of solve_upper_triangular.
void solve_upper_triangular_inplace(const DenseMatrix& r, std::span<double> x,
                                    Transpose transpose = Transpose::no);

/**
 * LU factorization with partial pivoting of a small square matrix.
 *
 * Construction fails with SingularCapacitance when a pivot falls below
 * pivot_tol * max|C_ij| (default pivot_tol = p * eps). rcond() is the exact
 * reciprocal 1-norm condition number, 1 / (||C||_1 ||C^-1||_1), which is
 * affordable because p is small (2r in the intended use).
 */
class LuFactors {
 public:
  LuFactors() = default;
  explicit LuFactors(const DenseMatrix& c,
                     std::optional<double> pivot_tol = std::nullopt);

  Index dim() const noexcept { return lu_.rows(); }
  double rcond() const noexcept { return rcond_; }

  DenseMatrix solve(const DenseMatrix& b) const;
  void solve_inplace(std::span<double> x) const;

 private:
  DenseMatrix lu_;
  std::vector<Index> pivots_;
  double rcond_ = 0.0;
};

struct LuSolution {
  DenseMatrix x;
  double rcond;
};

/// Factor c and solve c X = b in one call.
LuSolution lu_solve(const DenseMatrix& c, const DenseMatrix& b);

/// Moore-Penrose pseudoinverse R^-1 Q^T of a full-column-rank tall matrix.
/// Test-scale oracle; materializes the n x m result.
DenseMatrix pinv_oracle(const DenseMatrix& a);

/// Number of singular values above tol * sigma_max (0 for a zero matrix).
/// Singular values come from a Jacobi SVD, so keep this to small matrices.
Index numerical_rank(const DenseMatrix& a, double tol);

/// Singular values in decreasing order (Jacobi SVD, small matrices).
Vector singular_values(const DenseMatrix& a);

}  // namespace wls
