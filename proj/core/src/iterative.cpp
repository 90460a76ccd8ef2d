#include "wls/iterative.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "eigen_map.hpp"
#include "wls/errors.hpp"

namespace wls {

namespace {

Index budget(const IterativeConfig& cfg, Index n) {
  return cfg.max_iters > 0 ? cfg.max_iters : 4 * n;
}

void validate(const IterativeConfig& cfg) {
  if (!(cfg.tol > 0.0)) {
    throw std::invalid_argument("IterativeConfig: tol must be positive");
  }
  if (cfg.max_iters < 0) {
    throw std::invalid_argument("IterativeConfig: max_iters must be >= 0 (0 selects 4n)");
  }
}

}  // namespace

NormalOperator NormalOperator::from_matrix(std::shared_ptr<const DenseMatrix> a) {
  if (!a || a->empty()) {
    throw std::invalid_argument("NormalOperator: matrix is required");
  }
  NormalOperator op;
  op.rows = a->rows();
  op.cols = a->cols();
  op.apply = [a](std::span<const double> x, std::span<double> y) {
    detail::view(y).noalias() = detail::view(*a) * detail::view(x);
  };
  op.apply_transpose = [a](std::span<const double> y, std::span<double> x) {
    detail::view(x).noalias() = detail::view(*a).transpose() * detail::view(y);
  };
  return op;
}

CgReport normal_cg_solve(const NormalOperator& op, const DenseMatrix& c,
                         const IterativeConfig& cfg) {
  validate(cfg);
  if (!op.apply || !op.apply_transpose) {
    throw std::invalid_argument("normal_cg_solve: operator is incomplete");
  }
  if (c.rows() != op.cols) {
    throw DimensionMismatch("normal_cg_solve: C has " + std::to_string(c.rows()) +
                            " rows, A has " + std::to_string(op.cols) +
                            " columns");
  }
  const Index n = op.cols;
  const Index max_iters = budget(cfg, n);

  CgReport report{DenseMatrix(n, c.cols()), {}, {}};
  report.iterations.assign(static_cast<std::size_t>(c.cols()), 0);
  report.relative_residuals.assign(static_cast<std::size_t>(c.cols()), 0.0);

  Eigen::VectorXd res(n), dir(n), gram_dir(n), a_dir(op.rows);
  const auto as_span = [](Eigen::VectorXd& v) {
    return std::span<double>(v.data(), static_cast<std::size_t>(v.size()));
  };

  for (Index j = 0; j < c.cols(); ++j) {
    auto z = detail::view(report.z.col(j));
    res = detail::view(c.col(j));
    const double cnorm = res.norm();
    z.setZero();
    if (cnorm == 0.0) continue;

    dir = res;
    double rr = res.squaredNorm();
    double rel = 1.0;
    Index it = 0;
    while (it < max_iters) {
      ++it;
      op.apply(std::span<const double>(dir.data(), dir.size()), as_span(a_dir));
      op.apply_transpose(std::span<const double>(a_dir.data(), a_dir.size()),
                         as_span(gram_dir));
      const double curvature = dir.dot(gram_dir);
      if (!(curvature > 0.0)) break;
      const double alpha = rr / curvature;
      z.noalias() += alpha * dir;
      res.noalias() -= alpha * gram_dir;
      const double rr_next = res.squaredNorm();
      rel = std::sqrt(rr_next) / cnorm;
      if (rel <= cfg.tol) break;
      dir = res + (rr_next / rr) * dir;
      rr = rr_next;
    }
    report.iterations[static_cast<std::size_t>(j)] = it;
    report.relative_residuals[static_cast<std::size_t>(j)] = rel;
    if (!(rel <= cfg.tol)) {
      throw ConvergenceFailure("normal_cg_solve: column " + std::to_string(j) +
                                   " reached relative residual " +
                                   std::to_string(rel) + " after " +
                                   std::to_string(it) + " iterations",
                               static_cast<long>(j), static_cast<long>(it), rel);
    }
  }
  return report;
}

CgReport normal_cg_solve(const DenseMatrix& a, const DenseMatrix& c,
                         const IterativeConfig& cfg) {
  // Non-owning alias; the operator does not outlive this call.
  const std::shared_ptr<const DenseMatrix> alias(std::shared_ptr<void>(), &a);
  return normal_cg_solve(NormalOperator::from_matrix(alias), c, cfg);
}

CgAtaSolver::CgAtaSolver(std::shared_ptr<const DenseMatrix> a,
                         IterativeConfig cfg)
    : op_(NormalOperator::from_matrix(std::move(a))), cfg_(cfg) {
  validate(cfg_);
}

DenseMatrix CgAtaSolver::ata_solve(const DenseMatrix& c) const {
  return normal_cg_solve(op_, c, cfg_).z;
}

Vector CgAtaSolver::least_squares(std::span<const double> b) const {
  if (static_cast<Index>(b.size()) != op_.rows) {
    throw DimensionMismatch("CgAtaSolver::least_squares: b has length " +
                            std::to_string(b.size()) + ", expected " +
                            std::to_string(op_.rows));
  }
  DenseMatrix atb(op_.cols, 1);
  op_.apply_transpose(b, atb.col(0));
  const DenseMatrix x = normal_cg_solve(op_, atb, cfg_).z;
  return Vector(x.values().begin(), x.values().end());
}

PreparedBase make_iterative_base(DenseMatrix a, std::span<const double> b,
                                 const IterativeConfig& cfg) {
  if (a.rows() < a.cols()) {
    throw DimensionMismatch("make_iterative_base: need m >= n");
  }
  if (static_cast<Index>(b.size()) != a.rows()) {
    throw DimensionMismatch("make_iterative_base: b has length " +
                            std::to_string(b.size()) + ", expected " +
                            std::to_string(a.rows()));
  }
  auto ap = std::make_shared<const DenseMatrix>(std::move(a));
  auto solver = std::make_shared<const CgAtaSolver>(ap, cfg);
  Vector x0 = solver->least_squares(b);
  return PreparedBase(std::move(ap), std::move(solver),
                      Vector(b.begin(), b.end()), std::move(x0));
}

PreparedBase prepare(DenseMatrix a, std::span<const double> b, Backend backend,
                     const IterativeConfig& cfg) {
  switch (backend) {
    case Backend::qr:
      return prepare(std::move(a), b);
    case Backend::cg:
      return make_iterative_base(std::move(a), b, cfg);
  }
  throw std::invalid_argument("prepare: unknown backend");
}

}  // namespace wls
