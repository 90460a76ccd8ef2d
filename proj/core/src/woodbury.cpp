#include "wls/woodbury.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "eigen_map.hpp"
#include "wls/errors.hpp"

namespace wls {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::string shape(const DenseMatrix& a) {
  return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

void check_rhs(const PreparedBase& base, std::size_t len, const char* who) {
  if (static_cast<Index>(len) != base.rows()) {
    throw DimensionMismatch(std::string(who) + ": right-hand side has length " +
                            std::to_string(len) + ", A has " +
                            std::to_string(base.rows()) + " rows");
  }
}

void check_update(Index m, Index n, const LowRankUpdate& upd, const char* who) {
  if (upd.u().rows() != m || upd.v().rows() != n) {
    throw DimensionMismatch(std::string(who) + ": U is " + shape(upd.u()) +
                            ", V is " + shape(upd.v()) + ", A is " +
                            std::to_string(m) + "x" + std::to_string(n));
  }
  if (upd.rank() > n) {
    throw DimensionMismatch(std::string(who) + ": update rank " +
                            std::to_string(upd.rank()) + " exceeds n = " +
                            std::to_string(n));
  }
}

void check_workspace(const PreparedBase& base, const LowRankUpdate& upd,
                     const UpdateWorkspace& ws, const char* who) {
  check_update(base.rows(), base.cols(), upd, who);
  if (ws.z().rows() != base.cols() || ws.rank() != upd.rank()) {
    throw DimensionMismatch(std::string(who) +
                            ": workspace does not match base and update");
  }
}

// ||Â^T(Âx - b)|| with Â = A + UV^T applied as a product, never assembled.
double updated_ne_residual(const DenseMatrix& a, const LowRankUpdate& upd,
                           std::span<const double> x,
                           std::span<const double> b) {
  const auto A = detail::view(a);
  const auto U = detail::view(upd.u());
  const auto V = detail::view(upd.v());
  const auto xv = detail::view(x);
  const Eigen::VectorXd res = A * xv + U * (V.transpose() * xv) - detail::view(b);
  const Eigen::VectorXd g = A.transpose() * res + V * (U.transpose() * res);
  return g.norm();
}

// (A^T A)^-1 g in place. The QR path works on the Eigen-owned vector
// directly so the arithmetic never depends on heap alignment.
void ata_solve_inplace(const PreparedBase& base, Eigen::VectorXd& g) {
  if (const QRFactors* f = base.qr()) {
    const auto R = detail::view(f->r).triangularView<Eigen::Upper>();
    R.transpose().solveInPlace(g);
    R.solveInPlace(g);
    return;
  }
  const DenseMatrix z = base.solver().ata_solve(
      DenseMatrix::column(std::span<const double>(g.data(), g.size())));
  g = detail::view(z.col(0));
}

// A^+ b, reusing the bound x0 when b is the bound right-hand side.
Eigen::VectorXd base_solution(const PreparedBase& base, const Eigen::VectorXd& b) {
  const std::span<const double> bs(b.data(), static_cast<std::size_t>(b.size()));
  if (base.has_solution() && std::equal(bs.begin(), bs.end(), base.rhs().begin())) {
    return detail::view(std::span<const double>(base.x0()));
  }
  if (const QRFactors* f = base.qr()) {
    Eigen::VectorXd x = detail::view(f->q).transpose() * b;
    detail::view(f->r).triangularView<Eigen::Upper>().solveInPlace(x);
    return x;
  }
  const Vector x = base.solver().least_squares(bs);
  return detail::view(std::span<const double>(x));
}

// g -= Z C^-1 (Y^T g).
void apply_i_minus_m(const UpdateWorkspace& ws, Eigen::VectorXd& g) {
  Eigen::VectorXd t = detail::view(ws.yt()) * g;
  ws.capacitance().solve_inplace(std::span<double>(t.data(), t.size()));
  g.noalias() -= detail::view(ws.z()) * t;
}

// One column of the update solve; solve_updated and solve_many both land
// here so their results agree bit for bit. Inputs and outputs are staged
// through Eigen-owned vectors so kernel alignment never depends on where the
// caller's column lives.
void solve_column(const PreparedBase& base, const LowRankUpdate& upd,
                  const UpdateWorkspace& ws, std::span<const double> b,
                  std::span<double> x, int refine_steps) {
  const Index r = upd.rank();
  const auto A = detail::view(base.matrix());
  const auto U = detail::view(upd.u());
  const auto V = detail::view(upd.v());

  const Eigen::VectorXd bv = detail::view(b);
  Eigen::VectorXd w = base_solution(base, bv);
  const Eigen::VectorXd utb = U.transpose() * bv;
  w.noalias() += detail::view(ws.z()).leftCols(r) * utb;
  apply_i_minus_m(ws, w);

  // Corrected seminormal equations: the residual is formed with Â itself,
  // only the correction goes through (Â^T Â)^-1 = (I - M)(A^T A)^-1.
  for (int step = 0; step < refine_steps; ++step) {
    Eigen::VectorXd res = bv;
    res.noalias() -= A * w;
    const Eigen::VectorXd vtw = V.transpose() * w;
    res.noalias() -= U * vtw;
    Eigen::VectorXd g = A.transpose() * res;
    const Eigen::VectorXd utr = U.transpose() * res;
    g.noalias() += V * utr;
    ata_solve_inplace(base, g);
    apply_i_minus_m(ws, g);
    w += g;
  }
  detail::view(x) = w;
}

void check_refine(int steps, const char* who) {
  if (steps < 0) {
    throw std::invalid_argument(std::string(who) + ": refine_steps must be >= 0");
  }
}

}  // namespace

DenseMatrix QrAtaSolver::ata_solve(const DenseMatrix& c) const {
  const DenseMatrix half = solve_upper_triangular(qr_.r, c, Transpose::yes);
  return solve_upper_triangular(qr_.r, half);
}

Vector QrAtaSolver::least_squares(std::span<const double> b) const {
  Vector x = mat_vec(qr_.q, b, Transpose::yes);
  solve_upper_triangular_inplace(qr_.r, x);
  return x;
}

PreparedBase::PreparedBase(std::shared_ptr<const DenseMatrix> a,
                           std::shared_ptr<const AtaSolver> solver,
                           std::optional<Vector> b, std::optional<Vector> x0)
    : a_(std::move(a)),
      solver_(std::move(solver)),
      b_(std::move(b)),
      x0_(std::move(x0)) {
  if (!a_ || !solver_ || a_->empty()) {
    throw std::invalid_argument("PreparedBase: matrix and solver are required");
  }
  if (b_.has_value() != x0_.has_value()) {
    throw std::invalid_argument(
        "PreparedBase: b and x0 must be supplied together");
  }
  if (b_ && static_cast<Index>(b_->size()) != a_->rows()) {
    throw DimensionMismatch("PreparedBase: b has length " +
                            std::to_string(b_->size()) + ", expected " +
                            std::to_string(a_->rows()));
  }
  if (x0_ && static_cast<Index>(x0_->size()) != a_->cols()) {
    throw DimensionMismatch("PreparedBase: x0 has length " +
                            std::to_string(x0_->size()) + ", expected " +
                            std::to_string(a_->cols()));
  }
}

const QRFactors* PreparedBase::qr() const noexcept {
  const auto* qs = dynamic_cast<const QrAtaSolver*>(solver_.get());
  return qs ? &qs->factors() : nullptr;
}

const Vector& PreparedBase::rhs() const noexcept {
  static const Vector empty;
  return b_ ? *b_ : empty;
}

const Vector& PreparedBase::x0() const noexcept {
  static const Vector empty;
  return x0_ ? *x0_ : empty;
}

Vector PreparedBase::solution_for(std::span<const double> b) const {
  check_rhs(*this, b.size(), "PreparedBase::solution_for");
  if (b_ && std::equal(b.begin(), b.end(), b_->begin())) return *x0_;
  return solver_->least_squares(b);
}

LowRankUpdate::LowRankUpdate(DenseMatrix u, DenseMatrix v)
    : u_(std::move(u)), v_(std::move(v)) {
  if (u_.empty() || v_.empty() || u_.cols() != v_.cols()) {
    throw DimensionMismatch("LowRankUpdate: U is " + shape(u_) + ", V is " +
                            shape(v_) + "; need equal, positive column counts");
  }
}

DenseMatrix UpdateWorkspace::apply_m(const DenseMatrix& b) const {
  const DenseMatrix t = cap_.solve(mat_mul(yt_, b));
  return mat_mul(z_, t);
}

PreparedBase prepare(DenseMatrix a, std::span<const double> b) {
  if (static_cast<Index>(b.size()) != a.rows()) {
    throw DimensionMismatch("prepare: b has length " + std::to_string(b.size()) +
                            ", A is " + shape(a));
  }
  auto ap = std::make_shared<const DenseMatrix>(std::move(a));
  auto solver = std::make_shared<const QrAtaSolver>(qr_thin(*ap));
  Vector x0 = solver->least_squares(b);
  return PreparedBase(std::move(ap), std::move(solver),
                      Vector(b.begin(), b.end()), std::move(x0));
}

PreparedBase prepare(DenseMatrix a) {
  auto ap = std::make_shared<const DenseMatrix>(std::move(a));
  auto solver = std::make_shared<const QrAtaSolver>(qr_thin(*ap));
  return PreparedBase(std::move(ap), std::move(solver));
}

PreparedBase prepare_with_x0(DenseMatrix a, std::span<const double> b,
                             std::span<const double> x0) {
  auto ap = std::make_shared<const DenseMatrix>(std::move(a));
  auto solver = std::make_shared<const QrAtaSolver>(qr_thin(*ap));
  return PreparedBase(std::move(ap), std::move(solver),
                      Vector(b.begin(), b.end()), Vector(x0.begin(), x0.end()));
}

DenseMatrix ata_solve(const PreparedBase& base, const DenseMatrix& c) {
  if (c.rows() != base.cols()) {
    throw DimensionMismatch("ata_solve: C is " + shape(c) + ", expected " +
                            std::to_string(base.cols()) + " rows");
  }
  return base.solver().ata_solve(c);
}

UpdateWorkspace build_workspace(const PreparedBase& base,
                                const LowRankUpdate& upd,
                                const WorkspaceOptions& options) {
  const Index n = base.cols();
  const Index r = upd.rank();
  check_update(base.rows(), n, upd, "build_workspace");

  const auto U = detail::view(upd.u());
  const auto V = detail::view(upd.v());

  UpdateWorkspace ws;
  ws.x_ = DenseMatrix(n, 2 * r);
  auto X = detail::view(ws.x_);
  X.leftCols(r) = V;
  X.rightCols(r).noalias() = detail::view(base.matrix()).transpose() * U;

  // Y^T reuses A^T U from X rather than forming (A + UV^T)^T U.
  const Eigen::MatrixXd utu = U.transpose() * U;
  ws.yt_ = DenseMatrix(2 * r, n);
  auto Yt = detail::view(ws.yt_);
  Yt.topRows(r) = X.rightCols(r).transpose();
  Yt.topRows(r).noalias() += utu * V.transpose();
  Yt.bottomRows(r) = V.transpose();

  ws.z_ = ata_solve(base, ws.x_);

  DenseMatrix cap = DenseMatrix::identity(2 * r);
  detail::view(cap).noalias() += Yt * detail::view(ws.z_);
  ws.cap_ = LuFactors(cap);

  const double threshold =
      2.0 * static_cast<double>(r) * kEps * options.cap_guard;
  if (ws.cap_.rcond() < threshold) {
    throw SingularCapacitance(
        "build_workspace: capacitance I + Y^T Z has rcond " +
            std::to_string(ws.cap_.rcond()) +
            "; A + UV^T is numerically rank deficient",
        ws.cap_.rcond());
  }
  return ws;
}

SolveOutcome solve_updated(const PreparedBase& base, const LowRankUpdate& upd,
                           const UpdateWorkspace& ws, std::span<const double> b,
                           const SolveOptions& options) {
  check_workspace(base, upd, ws, "solve_updated");
  check_rhs(base, b.size(), "solve_updated");

  check_refine(options.refine_steps, "solve_updated");

  SolveOutcome out;
  out.x.resize(static_cast<std::size_t>(base.cols()));
  solve_column(base, upd, ws, b, out.x, options.refine_steps);
  out.cap_rcond = ws.capacitance().rcond();
  if (options.compute_ne_residual) {
    out.ne_residual = updated_ne_residual(base.matrix(), upd, out.x, b);
  }
  return out;
}

DenseMatrix solve_many(const PreparedBase& base, const LowRankUpdate& upd,
                       const UpdateWorkspace& ws, const DenseMatrix& bs,
                       const SolveOptions& options) {
  check_workspace(base, upd, ws, "solve_many");
  check_rhs(base, static_cast<std::size_t>(bs.rows()), "solve_many");
  check_refine(options.refine_steps, "solve_many");

  DenseMatrix xs(base.cols(), bs.cols());
  for (Index j = 0; j < bs.cols(); ++j) {
    solve_column(base, upd, ws, bs.col(j), xs.col(j), options.refine_steps);
  }
  return xs;
}

DenseMatrix pinv_update_explicit(const DenseMatrix& a, const DenseMatrix& u,
                                 const DenseMatrix& v, int refine_steps) {
  check_refine(refine_steps, "pinv_update_explicit");
  if (a.rows() > kExplicitMaxRows) {
    throw std::invalid_argument("pinv_update_explicit: m = " +
                                std::to_string(a.rows()) + " exceeds " +
                                std::to_string(kExplicitMaxRows));
  }
  const LowRankUpdate upd(u, v);
  const PreparedBase base = prepare(a);
  const UpdateWorkspace ws = build_workspace(base, upd);
  const Index r = upd.rank();

  // (A + UV^T)^+ = (I - M)(A^+ + Z_1 U^T), with Z_1 = (A^T A)^-1 V.
  DenseMatrix p = pinv_oracle(a);
  detail::view(p).noalias() +=
      detail::view(ws.z()).leftCols(r) * detail::view(u).transpose();
  p = p - ws.apply_m(p);

  if (refine_steps > 0) {
    const DenseMatrix a_hat = assemble_updated(a, u, v);
    const auto Ah = detail::view(a_hat);
    for (int step = 0; step < refine_steps; ++step) {
      Eigen::MatrixXd e = -Ah * detail::view(p);
      e.diagonal().array() += 1.0;
      const DenseMatrix g = detail::to_dense(Ah.transpose() * e);
      const DenseMatrix d = ata_solve(base, g);
      p = p + (d - ws.apply_m(d));
    }
  }
  return p;
}

DenseMatrix assemble_updated(const DenseMatrix& a, const DenseMatrix& u,
                             const DenseMatrix& v) {
  if (u.rows() != a.rows() || v.rows() != a.cols() || u.cols() != v.cols()) {
    throw DimensionMismatch("assemble_updated: A is " + shape(a) + ", U is " +
                            shape(u) + ", V is " + shape(v));
  }
  DenseMatrix out = a;
  detail::view(out).noalias() += detail::view(u) * detail::view(v).transpose();
  return out;
}

Vector baseline_solve(const DenseMatrix& a, const DenseMatrix& u,
                      const DenseMatrix& v, std::span<const double> b) {
  if (static_cast<Index>(b.size()) != a.rows()) {
    throw DimensionMismatch("baseline_solve: b has length " +
                            std::to_string(b.size()) + ", A is " + shape(a));
  }
  const QRFactors f = qr_thin(assemble_updated(a, u, v));
  Vector x = mat_vec(f.q, b, Transpose::yes);
  solve_upper_triangular_inplace(f.r, x);
  return x;
}

double normal_equations_residual(const DenseMatrix& a_hat,
                                 std::span<const double> x,
                                 std::span<const double> b) {
  Vector res = mat_vec(a_hat, x);
  if (res.size() != b.size()) {
    throw DimensionMismatch("normal_equations_residual: b has length " +
                            std::to_string(b.size()));
  }
  for (std::size_t i = 0; i < res.size(); ++i) res[i] -= b[i];
  return norm2(mat_vec(a_hat, res, Transpose::yes));
}

}  // namespace wls
