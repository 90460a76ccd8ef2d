#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <memory>

#include "support/oracles.hpp"
#include "wls/errors.hpp"
#include "wls/iterative.hpp"

using namespace wls;
using wls::testing::as_vector;
using wls::testing::rel_diff;

namespace {

DenseMatrix gaussian(std::uint64_t stream, Index rows, Index cols) {
  return gen_gaussian(31337, stream, rows, cols);
}

}  // namespace

TEST(NormalCg, IdentityConvergesInOneIteration) {
  const DenseMatrix c = gaussian(1, 6, 3);
  const CgReport rep = normal_cg_solve(DenseMatrix::identity(6), c);
  EXPECT_LT(rel_diff(rep.z, c), 1e-15);
  for (const Index it : rep.iterations) EXPECT_EQ(it, 1);
}

TEST(NormalCg, ZeroColumnTakesNoIterations) {
  const CgReport rep = normal_cg_solve(gaussian(2, 10, 4), DenseMatrix::zeros(4, 1));
  EXPECT_EQ(rep.iterations[0], 0);
  EXPECT_EQ(rep.z, DenseMatrix::zeros(4, 1));
}

TEST(NormalCg, DistinctEigenvaluesBoundIterations) {
  // A^T A = diag(1, 4, 4, 9, 9, 9): three distinct eigenvalues.
  DenseMatrix a(8, 6);
  const double d[] = {1, 2, 2, 3, 3, 3};
  for (Index j = 0; j < 6; ++j) a(j, j) = d[j];
  const CgReport rep = normal_cg_solve(a, gaussian(3, 6, 1));
  EXPECT_LE(rep.iterations[0], 3);
  const DenseMatrix gram = mat_mul(a, a, Transpose::yes);
  EXPECT_LT(rel_diff(mat_mul(gram, rep.z), gaussian(3, 6, 1)), 1e-12);
}

TEST(NormalCg, AgreesWithQrBackend) {
  const DenseMatrix a = gaussian(4, 200, 20);
  const DenseMatrix c = gaussian(5, 20, 3);
  const CgReport rep = normal_cg_solve(a, c);
  EXPECT_LT(rel_diff(rep.z, ata_solve(prepare(a), c)), 1e-8);
  for (const double rel : rep.relative_residuals) EXPECT_LE(rel, 1e-12);
}

TEST(NormalCg, OnlyUsesOperatorProducts) {
  auto a = std::make_shared<const DenseMatrix>(gaussian(6, 40, 8));
  NormalOperator inner = NormalOperator::from_matrix(a);
  int forward = 0, backward = 0;
  NormalOperator op{40, 8,
                    [&](std::span<const double> x, std::span<double> y) {
                      ++forward;
                      inner.apply(x, y);
                    },
                    [&](std::span<const double> y, std::span<double> x) {
                      ++backward;
                      inner.apply_transpose(y, x);
                    }};
  const CgReport rep = normal_cg_solve(op, gaussian(7, 8, 1));
  EXPECT_EQ(forward, rep.iterations[0]);
  EXPECT_EQ(backward, rep.iterations[0]);
  EXPECT_LT(rel_diff(rep.z, normal_cg_solve(*a, gaussian(7, 8, 1)).z), 1e-14);
}

TEST(NormalCg, BudgetExhaustionThrows) {
  const DenseMatrix a = gaussian(8, 100, 30);
  try {
    normal_cg_solve(a, gaussian(9, 30, 2), IterativeConfig{.tol = 1e-12, .max_iters = 2});
    FAIL() << "expected ConvergenceFailure";
  } catch (const ConvergenceFailure& e) {
    EXPECT_EQ(e.column(), 0);
    EXPECT_EQ(e.iterations(), 2);
    EXPECT_GT(e.relative_residual(), 1e-12);
  }
}

TEST(NormalCg, ConfigAndShapesValidated) {
  const DenseMatrix a = gaussian(10, 5, 3);
  EXPECT_THROW(normal_cg_solve(a, DenseMatrix(3, 1), IterativeConfig{.tol = 0.0}),
               std::invalid_argument);
  EXPECT_THROW(normal_cg_solve(a, DenseMatrix(3, 1), IterativeConfig{.max_iters = -1}),
               std::invalid_argument);
  EXPECT_THROW(normal_cg_solve(a, DenseMatrix(4, 1)), DimensionMismatch);
}

TEST(IterativeBase, IdentityAndOrthonormal) {
  const Vector b{1, -2, 3, 4};
  const PreparedBase id = make_iterative_base(DenseMatrix::identity(4), b);
  EXPECT_LT(rel_diff(id.x0(), b), 1e-14);
  EXPECT_EQ(id.qr(), nullptr);
  EXPECT_EQ(id.solver().name(), "cg");

  // Q with orthonormal columns: x0 = Q^T b.
  const DenseMatrix q = qr_thin(gaussian(11, 4, 2)).q;
  const PreparedBase base = make_iterative_base(q, b);
  EXPECT_LT(rel_diff(base.x0(), as_vector(mat_mul(q, DenseMatrix::column(b),
                                                  Transpose::yes))),
            1e-12);
}

TEST(IterativeBase, AgreesWithQrOnRandomProblem) {
  const DenseMatrix a = gaussian(12, 300, 30);
  const Vector b = as_vector(gaussian(13, 300, 1));
  const PreparedBase cg = prepare(a, b, Backend::cg);
  const PreparedBase qr = prepare(a, b, Backend::qr);
  EXPECT_LT(rel_diff(cg.x0(), qr.x0()), 1e-8);
}

TEST(IterativeBase, UpdatedSolveMatchesQrBackend) {
  const DenseMatrix a = gaussian(14, 120, 15);
  const DenseMatrix u = gaussian(15, 120, 2);
  const DenseMatrix v = gaussian(16, 15, 2);
  const Vector b = as_vector(gaussian(17, 120, 1));
  const LowRankUpdate upd(u, v);
  const PreparedBase cg = prepare(a, b, Backend::cg);
  const PreparedBase qr = prepare(a, b, Backend::qr);
  const Vector x_cg = solve_updated(cg, upd, build_workspace(cg, upd), b).x;
  const Vector x_qr = solve_updated(qr, upd, build_workspace(qr, upd), b).x;
  EXPECT_LT(rel_diff(x_cg, x_qr), 1e-8);
}

TEST(IterativeBase, ShapesValidated) {
  EXPECT_THROW(make_iterative_base(DenseMatrix(2, 3), Vector(2)), DimensionMismatch);
  EXPECT_THROW(make_iterative_base(DenseMatrix::identity(3), Vector(2)),
               DimensionMismatch);
}
