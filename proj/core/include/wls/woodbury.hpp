#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string_view>

#include "wls/dense_matrix.hpp"
#include "wls/kernels.hpp"

namespace wls {

/// Relative tolerances the solvers are expected to meet on Gaussian
/// instances with cond(A) up to about 1e3. They are instance dependent and
/// only used as documented targets (tests, diagnostics), never as stopping
/// rules.
inline constexpr double kNormalEquationsTol = 1e-10;
inline constexpr double kAtaTol = 1e-10;

/// Largest row count accepted by pinv_update_explicit, which forms n x m
/// matrices.
inline constexpr Index kExplicitMaxRows = 1000;

/**
 * Solves with the Gram matrix A^T A of a fixed tall matrix A, and solves the
 * base least squares problem min ||Ax - b||. Implementations are immutable
 * and may be shared across threads.
 */
class AtaSolver {
 public:
  virtual ~AtaSolver() = default;

  /// (A^T A)^-1 C, column by column.
  virtual DenseMatrix ata_solve(const DenseMatrix& c) const = 0;
  /// A^+ b.
  virtual Vector least_squares(std::span<const double> b) const = 0;
  virtual std::string_view name() const noexcept = 0;
};

/// A^T A solves through a thin QR: (A^T A)^-1 C = R^-1 (R^-T C).
class QrAtaSolver final : public AtaSolver {
 public:
  explicit QrAtaSolver(QRFactors qr) : qr_(std::move(qr)) {}

  DenseMatrix ata_solve(const DenseMatrix& c) const override;
  Vector least_squares(std::span<const double> b) const override;
  std::string_view name() const noexcept override { return "qr"; }

  const QRFactors& factors() const noexcept { return qr_; }

 private:
  QRFactors qr_;
};

/**
 * Everything about the unmodified problem that is reused across updates: the
 * matrix A, an A^T A solver, and optionally the right-hand side b the base
 * solution x0 = A^+ b was computed for.
 *
 * Cheap to copy (shared, immutable state).
 */
class PreparedBase {
 public:
  PreparedBase(std::shared_ptr<const DenseMatrix> a,
               std::shared_ptr<const AtaSolver> solver,
               std::optional<Vector> b = std::nullopt,
               std::optional<Vector> x0 = std::nullopt);

  const DenseMatrix& matrix() const noexcept { return *a_; }
  const std::shared_ptr<const DenseMatrix>& shared_matrix() const noexcept {
    return a_;
  }
  Index rows() const noexcept { return a_->rows(); }
  Index cols() const noexcept { return a_->cols(); }

  const AtaSolver& solver() const noexcept { return *solver_; }
  /// QR factors when the QR backend is installed, else nullptr.
  const QRFactors* qr() const noexcept;

  bool has_solution() const noexcept { return x0_.has_value(); }
  /// Right-hand side x0 was computed for; empty without a bound solution.
  const Vector& rhs() const noexcept;
  /// Base solution A^+ b; empty without a bound solution.
  const Vector& x0() const noexcept;

  /// A^+ b, reusing x0 when b equals the bound right-hand side bit for bit,
  /// otherwise one base solve through the stored solver.
  Vector solution_for(std::span<const double> b) const;

 private:
  std::shared_ptr<const DenseMatrix> a_;
  std::shared_ptr<const AtaSolver> solver_;
  std::optional<Vector> b_;
  std::optional<Vector> x0_;
};

/// Rank-r modification A -> A + U V^T.
class LowRankUpdate {
 public:
  /// Throws DimensionMismatch unless u.cols() == v.cols() >= 1.
  LowRankUpdate(DenseMatrix u, DenseMatrix v);

  const DenseMatrix& u() const noexcept { return u_; }
  const DenseMatrix& v() const noexcept { return v_; }
  Index rank() const noexcept { return u_.cols(); }

 private:
  DenseMatrix u_;
  DenseMatrix v_;
};

struct WorkspaceOptions {
  /// Capacitance is rejected when rcond < 2r * eps * cap_guard.
  double cap_guard = 1e3;
};

/**
 * Per-update state of the implicit pseudoinverse update:
 *
 *   X   = [V, A^T U]                      (n x 2r)
 *   Y^T = [U^T A + (U^T U) V^T; V^T]      (2r x n)
 *   Z   = (A^T A)^-1 X                    (n x 2r)
 *   C   = I_2r + Y^T Z, factorized        (2r x 2r)
 *
 * The n x n matrix M = Z C^-1 Y^T is never formed.
 */
class UpdateWorkspace {
 public:
  const DenseMatrix& x() const noexcept { return x_; }
  const DenseMatrix& yt() const noexcept { return yt_; }
  const DenseMatrix& z() const noexcept { return z_; }
  const LuFactors& capacitance() const noexcept { return cap_; }
  Index rank() const noexcept { return z_.cols() / 2; }

  /// M B = Z C^-1 (Y^T B), evaluated right to left.
  DenseMatrix apply_m(const DenseMatrix& b) const;

 private:
  friend UpdateWorkspace build_workspace(const PreparedBase&,
                                         const LowRankUpdate&,
                                         const WorkspaceOptions&);
  DenseMatrix x_;
  DenseMatrix yt_;
  DenseMatrix z_;
  LuFactors cap_;
};

struct SolveOptions {
  /// Also report ||Â^T(Âx - b)||_2 (costs two products with Â).
  bool compute_ne_residual = false;
  /// Refinement passes x += S Â^T (b - Âx), where S = (I - M)(A^T A)^-1 is
  /// applied through the workspace. The bare update formula behaves like the
  /// normal equations (error ~ cond(Â)^2 eps); one pass brings it to the
  /// level of a QR solve at O(mn) extra cost. 0 gives the bare formula.
  int refine_steps = 1;
};

struct SolveOutcome {
  Vector x;
  double cap_rcond = 0.0;
  std::optional<double> ne_residual;
};

/// QR backend: factor A once and bind x0 = R^-1 Q^T b. Throws RankDeficient.
PreparedBase prepare(DenseMatrix a, std::span<const double> b);

/// QR backend without a bound right-hand side.
PreparedBase prepare(DenseMatrix a);

/// QR backend with a caller-supplied base solution x0 for b.
PreparedBase prepare_with_x0(DenseMatrix a, std::span<const double> b,
                             std::span<const double> x0);

/// (A^T A)^-1 C through the base's solver.
DenseMatrix ata_solve(const PreparedBase& base, const DenseMatrix& c);

/// Builds X, Y^T, Z and the factorized capacitance. Throws
/// SingularCapacitance when A + UV^T is (numerically) rank deficient.
UpdateWorkspace build_workspace(const PreparedBase& base,
                                const LowRankUpdate& upd,
                                const WorkspaceOptions& options = {});

/// Minimizer of ||b - (A + UV^T)x||_2:
///   w = x0 + Z_1 (U^T b),  x = w - Z C^-1 (Y^T w),
/// followed by options.refine_steps refinement passes.
SolveOutcome solve_updated(const PreparedBase& base, const LowRankUpdate& upd,
                           const UpdateWorkspace& ws, std::span<const double> b,
                           const SolveOptions& options = {});

/// solve_updated for each column of bs, sharing Z and the capacitance.
/// Column j is bitwise identical to solve_updated on bs column j with the
/// same refine_steps. compute_ne_residual is ignored.
DenseMatrix solve_many(const PreparedBase& base, const LowRankUpdate& upd,
                       const UpdateWorkspace& ws, const DenseMatrix& bs,
                       const SolveOptions& options = {});

/// Explicit (A + UV^T)^+ = A^+ - M A^+ + (I - M)(A^T A)^-1 V U^T for
/// test-scale problems (m <= kExplicitMaxRows), then refine_steps passes of
/// P += S Â^T (I - ÂP) as in solve_updated.
DenseMatrix pinv_update_explicit(const DenseMatrix& a, const DenseMatrix& u,
                                 const DenseMatrix& v, int refine_steps = 1);

/// Assembles Â = A + UV^T and solves from scratch with a fresh thin QR.
Vector baseline_solve(const DenseMatrix& a, const DenseMatrix& u,
                      const DenseMatrix& v, std::span<const double> b);

/// A + U V^T.
DenseMatrix assemble_updated(const DenseMatrix& a, const DenseMatrix& u,
                             const DenseMatrix& v);

/// ||Â^T (Â x - b)||_2.
double normal_equations_residual(const DenseMatrix& a_hat,
                                 std::span<const double> x,
                                 std::span<const double> b);

}  // namespace wls
