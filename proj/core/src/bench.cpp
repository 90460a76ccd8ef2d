#include "wls/bench.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "wls/errors.hpp"
#include "wls/woodbury.hpp"

namespace wls {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t elapsed_ns(Clock::time_point from, Clock::time_point to) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(to - from).count();
}

double relative_difference(const Vector& x, const Vector& reference) {
  double diff = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - reference[i];
    diff += d * d;
  }
  return std::sqrt(diff) / norm2(reference);
}

struct Timed {
  std::int64_t scratch_ns;
  std::int64_t woodbury_ns;
  double rel_forward_error;
};

Timed run_pair(const PreparedBase& base, const LowRankUpdate& upd,
               const Vector& b) {
  const auto t0 = Clock::now();
  const Vector x1 = baseline_solve(base.matrix(), upd.u(), upd.v(), b);
  const auto t1 = Clock::now();

  const auto t2 = Clock::now();
  const UpdateWorkspace ws = build_workspace(base, upd);
  const SolveOutcome x2 = solve_updated(base, upd, ws, b);
  const auto t3 = Clock::now();

  return {elapsed_ns(t0, t1), elapsed_ns(t2, t3),
          relative_difference(x2.x, x1)};
}

}  // namespace

std::uint64_t stream_id(Index n, Index r, Index rep, StreamRole role) {
  if (n < 0 || n >= (Index{1} << 24) || r < 0 || r >= (Index{1} << 16) ||
      rep < 0 || rep >= (Index{1} << 20)) {
    throw std::out_of_range("stream_id: field out of range");
  }
  return (static_cast<std::uint64_t>(n) << 40) |
         (static_cast<std::uint64_t>(r) << 24) |
         (static_cast<std::uint64_t>(rep) << 4) |
         static_cast<std::uint64_t>(role);
}

void validate(const BenchConfig& cfg) {
  if (cfg.n_list.empty() || cfg.r_list.empty()) {
    throw std::invalid_argument("bench: n_list and r_list must be nonempty");
  }
  const Index max_n = *std::max_element(cfg.n_list.begin(), cfg.n_list.end());
  const Index min_n = *std::min_element(cfg.n_list.begin(), cfg.n_list.end());
  const Index max_r = *std::max_element(cfg.r_list.begin(), cfg.r_list.end());
  const Index min_r = *std::min_element(cfg.r_list.begin(), cfg.r_list.end());
  if (min_n < 1 || min_r < 1) {
    throw std::invalid_argument("bench: sizes must be positive");
  }
  if (cfg.m < max_n) {
    throw std::invalid_argument("bench: need m >= max(n_list)");
  }
  if (max_r > min_n) {
    throw std::invalid_argument("bench: need every r <= every n");
  }
  if (cfg.reps < 1) throw std::invalid_argument("bench: reps must be >= 1");
}

std::vector<BenchRecord> run_benchmark(
    const BenchConfig& cfg,
    const std::function<void(const BenchRecord&)>& progress) {
  validate(cfg);
  std::vector<BenchRecord> records;
  records.reserve(cfg.n_list.size() * cfg.r_list.size() *
                  static_cast<std::size_t>(cfg.reps));

  for (const Index n : cfg.n_list) {
    Index cur_r = 0;
    Index cur_rep = -1;
    try {
      const DenseMatrix b_mat =
          gen_gaussian(cfg.seed, stream_id(n, 0, 0, StreamRole::b), cfg.m, 1);
      const Vector b(b_mat.values().begin(), b_mat.values().end());
      const PreparedBase base = prepare(
          gen_gaussian(cfg.seed, stream_id(n, 0, 0, StreamRole::a), cfg.m, n),
          b, cfg.backend, cfg.cg);

      for (const Index r : cfg.r_list) {
        cur_r = r;
        cur_rep = -1;
        const auto make_update = [&](Index rep) {
          return LowRankUpdate(
              gen_gaussian(cfg.seed, stream_id(n, r, rep, StreamRole::u), cfg.m,
                           r),
              gen_gaussian(cfg.seed, stream_id(n, r, rep, StreamRole::v), n, r));
        };

        run_pair(base, make_update(0), b);  // warm-up, untimed

        for (Index rep = 0; rep < cfg.reps; ++rep) {
          cur_rep = rep;
          const LowRankUpdate upd = make_update(rep);
          const Timed t = run_pair(base, upd, b);

          BenchRecord rec;
          rec.m = cfg.m;
          rec.n = n;
          rec.r = r;
          rec.rep = rep;
          rec.seed = cfg.seed;
          rec.t_scratch_ns = t.scratch_ns;
          rec.t_woodbury_ns = std::max<std::int64_t>(t.woodbury_ns, 1);
          rec.speedup = static_cast<double>(rec.t_scratch_ns) /
                        static_cast<double>(rec.t_woodbury_ns);
          rec.rel_forward_error = t.rel_forward_error;
          records.push_back(rec);
          if (progress) progress(rec);
        }
      }
    } catch (...) {
      std::throw_with_nested(Error(
          "run_benchmark: instance m=" + std::to_string(cfg.m) +
          " n=" + std::to_string(n) + " r=" + std::to_string(cur_r) +
          (cur_rep < 0 ? std::string(" (setup/warm-up)")
                       : " rep=" + std::to_string(cur_rep)) +
          " failed"));
    }
  }

  if (!cfg.out_path.empty()) write_bench_csv(cfg.out_path, records);
  return records;
}

double median_speedup(const std::vector<BenchRecord>& records, Index n,
                      Index r) {
  std::vector<double> s;
  for (const auto& rec : records) {
    if (rec.n == n && rec.r == r) s.push_back(rec.speedup);
  }
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(s.begin(), s.end());
  const std::size_t mid = s.size() / 2;
  return s.size() % 2 ? s[mid] : 0.5 * (s[mid - 1] + s[mid]);
}

}  // namespace wls
