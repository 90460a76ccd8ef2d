#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "wls/dense_matrix.hpp"
#include "wls/iterative.hpp"
#include "wls/matrix_io.hpp"

namespace wls {

/**
 * Seeded, platform-independent Gaussian source.
 *
 * Engine: xoshiro256** seeded by splitmix64. The stream (seed, stream_id)
 * initializes splitmix64 with
 *
 *   s = splitmix64(seed) ^ rotl(splitmix64(stream_id ^ 0xD1B54A32D192ED03), 17)
 *
 * and draws the four state words from it. Normals come in pairs from the
 * Box-Muller transform with u1 = (k1 + 1) / 2^53 in (0, 1] and
 * u2 = k2 / 2^53 in [0, 1), where k is the top 53 bits of an engine output:
 *
 *   z0 = sqrt(-2 ln u1) cos(2 pi u2),   z1 = sqrt(-2 ln u1) sin(2 pi u2).
 */
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64() noexcept;
  double next() noexcept;

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// rows x cols standard normal matrix, filled in column-major order from
/// GaussianStream(seed, stream_id).
DenseMatrix gen_gaussian(std::uint64_t seed, std::uint64_t stream_id, Index rows,
                         Index cols);

/// Roles of the generated operands inside one benchmark instance.
enum class StreamRole : std::uint64_t { a = 0, b = 1, u = 2, v = 3 };

/**
 * Stream id of one operand:
 *
 *   ((n << 40) | (r << 24) | (rep << 4) | role)
 *
 * A and b use r = 0, rep = 0, so they depend on n only and are shared by
 * every (r, rep) at that n. U and V use the actual r and rep (r >= 1), so
 * they are fresh per repetition. Fields must fit: n < 2^24, r < 2^16,
 * rep < 2^20.
 */
std::uint64_t stream_id(Index n, Index r, Index rep, StreamRole role);

struct BenchConfig {
  Index m = 0;
  std::vector<Index> n_list;
  std::vector<Index> r_list;
  Index reps = 1;
  std::uint64_t seed = 0;
  Backend backend = Backend::qr;
  IterativeConfig cg;
  std::filesystem::path out_path;  // empty: caller does not want a CSV
};

/// Throws std::invalid_argument unless m >= max(n_list) >= max(r_list) >= 1
/// and reps >= 1.
void validate(const BenchConfig& cfg);

/**
 * Timing protocol, for every n in n_list (A, b generated and prepared once,
 * untimed), every r in r_list, every rep in [0, reps):
 *
 *  - scratch: assemble Â = A + UV^T, thin QR with explicit Q, x1 = R^-1 Q^T b.
 *  - update:  build_workspace + solve_updated on the prepared base (the
 *    preparation of A is excluded).
 *
 * One untimed warm-up of both paths precedes the timed repetitions of each
 * (n, r). Timings use steady_clock on the calling thread.
 *
 * progress, if set, is called after every record.
 */
std::vector<BenchRecord> run_benchmark(
    const BenchConfig& cfg,
    const std::function<void(const BenchRecord&)>& progress = {});

/// Median of speedup over the records matching (n, r); NaN if none match.
double median_speedup(const std::vector<BenchRecord>& records, Index n,
                      Index r);

}  // namespace wls
