#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <exception>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "wls/bench.hpp"
#include "wls/errors.hpp"
#include "wls/iterative.hpp"
#include "wls/matrix_io.hpp"
#include "wls/woodbury.hpp"

namespace wls::cli {

namespace {

struct SolveArgs {
  std::string a, b, u, v, x0, out;
  Backend backend = Backend::qr;
  IterativeConfig cg;
  int refine_steps = 1;
};

struct BenchArgs {
  Index m = 0;
  std::vector<Index> n_list;
  std::vector<Index> r_list;
  Index reps = 1;
  std::uint64_t seed = 0;
  Backend backend = Backend::qr;
  IterativeConfig cg;
  std::string out;
};

const std::map<std::string, Backend> kBackends{{"qr", Backend::qr},
                                               {"cg", Backend::cg}};

Vector read_vector(const std::string& path, Index expected_len, const char* what) {
  const DenseMatrix m = read_matrix(path);
  if (m.cols() != 1 || m.rows() != expected_len) {
    throw DimensionMismatch(std::string(what) + " must be " +
                            std::to_string(expected_len) + "x1, file holds " +
                            std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()));
  }
  return Vector(m.values().begin(), m.values().end());
}

int run_solve(const SolveArgs& args, std::ostream& out) {
  DenseMatrix a = read_matrix(args.a);
  const Index m = a.rows();
  const Index n = a.cols();
  const Vector b = read_vector(args.b, m, "b");
  const LowRankUpdate upd(read_matrix(args.u), read_matrix(args.v));

  std::optional<PreparedBase> base;
  if (!args.x0.empty()) {
    Vector x0 = read_vector(args.x0, n, "x0");
    if (args.backend == Backend::qr) {
      base.emplace(prepare_with_x0(std::move(a), b, x0));
    } else {
      auto ap = std::make_shared<const DenseMatrix>(std::move(a));
      base.emplace(ap, std::make_shared<const CgAtaSolver>(ap, args.cg), b,
                   std::move(x0));
    }
  } else {
    base.emplace(prepare(std::move(a), b, args.backend, args.cg));
  }

  const UpdateWorkspace ws = build_workspace(*base, upd);
  const SolveOutcome res =
      solve_updated(*base, upd, ws, b,
                    SolveOptions{.compute_ne_residual = true,
                                 .refine_steps = args.refine_steps});
  write_matrix(args.out, DenseMatrix::column(res.x));

  out << "wrote " << args.out << " (n=" << n << ", r=" << upd.rank()
      << ", backend=" << base->solver().name()
      << ", capacitance rcond=" << res.cap_rcond
      << ", normal-equations residual=" << res.ne_residual.value_or(NAN) << ")\n";
  return kOk;
}

int run_bench(const BenchArgs& args, std::ostream& out) {
  BenchConfig cfg;
  cfg.m = args.m;
  cfg.n_list = args.n_list;
  cfg.r_list = args.r_list;
  cfg.reps = args.reps;
  cfg.seed = args.seed;
  cfg.backend = args.backend;
  cfg.cg = args.cg;
  cfg.out_path = args.out;
  validate(cfg);

  out << "m=" << cfg.m << " backend=" << (cfg.backend == Backend::qr ? "qr" : "cg")
      << " seed=" << cfg.seed << "\n";
  const auto records = run_benchmark(cfg, [&](const BenchRecord& rec) {
    out << "  n=" << rec.n << " r=" << rec.r << " rep=" << rec.rep
        << " scratch=" << rec.t_scratch_ns / 1e6 << "ms"
        << " update=" << rec.t_woodbury_ns / 1e6 << "ms"
        << " speedup=" << rec.speedup << " err=" << rec.rel_forward_error << "\n";
  });

  out << "median speedup:\n";
  for (const Index n : cfg.n_list) {
    for (const Index r : cfg.r_list) {
      double worst = 0.0;
      for (const auto& rec : records) {
        if (rec.n == n && rec.r == r) worst = std::max(worst, rec.rel_forward_error);
      }
      out << "  n=" << n << " r=" << r << ": " << median_speedup(records, n, r)
          << "x (max rel forward error " << worst << ")\n";
    }
  }
  out << "wrote " << args.out << " (" << records.size() << " records)\n";
  return kOk;
}

// Flattens nested exceptions into one line and picks the exit code of the
// innermost error.
void describe(const std::exception& e, std::string& line, int& code) {
  if (!line.empty()) line += ": ";
  line += e.what();
  if (dynamic_cast<const SingularCapacitance*>(&e)) {
    code = kSingularCapacitance;
  } else if (dynamic_cast<const RankDeficient*>(&e)) {
    code = kRankDeficient;
  } else if (dynamic_cast<const ConvergenceFailure*>(&e)) {
    code = kNoConvergence;
  } else if (dynamic_cast<const Singular*>(&e)) {
    code = kSingular;
  } else if (dynamic_cast<const DimensionMismatch*>(&e)) {
    code = kDimension;
  } else if (dynamic_cast<const IoError*>(&e) ||
             dynamic_cast<const MalformedHeader*>(&e) ||
             dynamic_cast<const NonFiniteValue*>(&e)) {
    code = kIo;
  } else if (dynamic_cast<const std::invalid_argument*>(&e) ||
             dynamic_cast<const std::out_of_range*>(&e)) {
    code = kUsage;
  } else {
    code = kInternal;
  }
  try {
    std::rethrow_if_nested(e);
  } catch (const std::exception& inner) {
    describe(inner, line, code);
  } catch (...) {
  }
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"Least squares with low-rank updates: reuse a factorization of A "
               "to solve min ||b - (A + UV^T)x||"};
  app.name("wls");
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve = app.add_subcommand(
      "solve", "Solve the updated problem from MatrixMarket files");
  solve->add_option("--a", solve_args.a, "A (m x n, m >= n)")->required();
  solve->add_option("--b", solve_args.b, "b (m x 1)")->required();
  solve->add_option("--u", solve_args.u, "U (m x r)")->required();
  solve->add_option("--v", solve_args.v, "V (n x r)")->required();
  solve->add_option("--x0", solve_args.x0, "precomputed A^+ b (n x 1)");
  solve->add_option("--backend", solve_args.backend, "A^T A solver: qr or cg")
      ->transform(CLI::CheckedTransformer(kBackends));
  solve->add_option("--cg-tol", solve_args.cg.tol, "CG relative residual target")
      ->check(CLI::PositiveNumber);
  solve->add_option("--cg-max-iters", solve_args.cg.max_iters,
                    "CG iteration budget per column (0: 4n)")
      ->check(CLI::NonNegativeNumber);
  solve->add_option("--refine-steps", solve_args.refine_steps,
                    "refinement passes after the update formula (0: bare formula)")
      ->check(CLI::NonNegativeNumber);
  solve->add_option("--out", solve_args.out, "output x (n x 1)")->required();

  BenchArgs bench_args;
  auto* bench = app.add_subcommand(
      "bench", "Time updated solves against from-scratch QR, write CSV");
  bench->add_option("--m", bench_args.m, "rows of A")->required()->check(
      CLI::PositiveNumber);
  bench->add_option("--n-list", bench_args.n_list, "comma-separated column counts")
      ->required()
      ->delimiter(',');
  bench->add_option("--r-list", bench_args.r_list, "comma-separated update ranks")
      ->required()
      ->delimiter(',');
  bench->add_option("--reps", bench_args.reps, "timed repetitions per (n, r)")
      ->required()
      ->check(CLI::PositiveNumber);
  bench->add_option("--seed", bench_args.seed, "64-bit generator seed")->required();
  bench->add_option("--backend", bench_args.backend, "A^T A solver: qr or cg")
      ->transform(CLI::CheckedTransformer(kBackends));
  bench->add_option("--cg-tol", bench_args.cg.tol, "CG relative residual target")
      ->check(CLI::PositiveNumber);
  bench->add_option("--out", bench_args.out, "CSV output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "wls: " << e.what() << "\n";
    const CLI::App* sub = solve->parsed() ? solve : bench->parsed() ? bench : &app;
    err << sub->help();
    return kUsage;
  }

  try {
    if (solve->parsed()) return run_solve(solve_args, out);
    return run_bench(bench_args, out);
  } catch (const std::exception& e) {
    std::string line;
    int code = kInternal;
    describe(e, line, code);
    err << "wls: error: " << line << "\n";
    return code;
  }
}

}  // namespace wls::cli
