#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "wls/dense_matrix.hpp"
#include "wls/woodbury.hpp"

namespace wls {

/// Stopping rule for conjugate gradients on z -> A^T A z. max_iters = 0 means
/// the default budget of 4n.
struct IterativeConfig {
  double tol = 1e-12;
  Index max_iters = 0;
};

/**
 * The normal operator z -> A^T (A z), given only products with A and A^T.
 * apply writes A x (length m) into y; apply_transpose writes A^T y (length n).
 */
struct NormalOperator {
  Index rows = 0;
  Index cols = 0;
  std::function<void(std::span<const double> x, std::span<double> y)> apply;
  std::function<void(std::span<const double> y, std::span<double> x)>
      apply_transpose;

  static NormalOperator from_matrix(std::shared_ptr<const DenseMatrix> a);
};

struct CgReport {
  DenseMatrix z;
  std::vector<Index> iterations;  // per column
  std::vector<double> relative_residuals;  // recurrence residual, per column
};

/**
 * Conjugate gradients on A^T A z = c, one column at a time, without ever
 * forming A^T A. A column stops once its recurrence residual satisfies
 * ||r|| <= tol * ||c||. Zero columns return zero after 0 iterations.
 *
 * Throws ConvergenceFailure if a column is still above tol after max_iters.
 * CG on the normal equations squares the condition number of A; expect
 * slow convergence beyond cond(A) ~ 1e3.
 */
CgReport normal_cg_solve(const NormalOperator& op, const DenseMatrix& c,
                         const IterativeConfig& cfg = {});

CgReport normal_cg_solve(const DenseMatrix& a, const DenseMatrix& c,
                         const IterativeConfig& cfg = {});

/// AtaSolver backed by normal_cg_solve; least_squares runs CG on
/// A^T A x = A^T b.
class CgAtaSolver final : public AtaSolver {
 public:
  CgAtaSolver(std::shared_ptr<const DenseMatrix> a, IterativeConfig cfg);

  DenseMatrix ata_solve(const DenseMatrix& c) const override;
  Vector least_squares(std::span<const double> b) const override;
  std::string_view name() const noexcept override { return "cg"; }

  const IterativeConfig& config() const noexcept { return cfg_; }

 private:
  NormalOperator op_;
  IterativeConfig cfg_;
};

/// PreparedBase whose A^T A solver and x0 both come from CG.
PreparedBase make_iterative_base(DenseMatrix a, std::span<const double> b,
                                 const IterativeConfig& cfg = {});

enum class Backend { qr, cg };

/// Dispatches to prepare (qr) or make_iterative_base (cg).
PreparedBase prepare(DenseMatrix a, std::span<const double> b, Backend backend,
                     const IterativeConfig& cfg = {});

}  // namespace wls
