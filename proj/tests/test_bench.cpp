#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <numbers>
#include <set>

#include "wls/bench.hpp"
#include "wls/errors.hpp"

using namespace wls;

namespace {

// Straight transcription of the published splitmix64 / xoshiro256** reference
// code, used to check the generator against its documented construction.
struct ReferenceStream {
  std::uint64_t s[4];

  static std::uint64_t splitmix(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9;
    z = (z ^ (z >> 27)) * 0x94d049bb133111eb;
    return z ^ (z >> 31);
  }

  ReferenceStream(std::uint64_t seed, std::uint64_t id) {
    std::uint64_t a = seed, b = id ^ 0xD1B54A32D192ED03;
    std::uint64_t x = splitmix(a) ^ std::rotl(splitmix(b), 17);
    for (auto& w : s) w = splitmix(x);
  }

  std::uint64_t next() {
    const std::uint64_t result = std::rotl(s[1] * 5, 7) * 9;
    const std::uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = std::rotl(s[3], 45);
    return result;
  }
};

BenchConfig small_config() {
  BenchConfig cfg;
  cfg.m = 60;
  cfg.n_list = {10, 20};
  cfg.r_list = {1, 3};
  cfg.reps = 2;
  cfg.seed = 9;
  return cfg;
}

}  // namespace

TEST(GaussianStream, MatchesReferenceEngine) {
  std::uint64_t zero = 0;
  EXPECT_EQ(ReferenceStream::splitmix(zero), 0xe220a8397b1dcdafULL);

  for (const std::uint64_t id : {0ULL, 1ULL, 0xFFFFFFFFULL}) {
    GaussianStream g(42, id);
    ReferenceStream ref(42, id);
    for (int k = 0; k < 100; ++k) ASSERT_EQ(g.next_u64(), ref.next());
  }
}

TEST(GaussianStream, BoxMullerPairs) {
  GaussianStream g(7, 3);
  ReferenceStream ref(7, 3);
  for (int k = 0; k < 50; ++k) {
    const double u1 = static_cast<double>((ref.next() >> 11) + 1) * 0x1p-53;
    const double u2 = static_cast<double>(ref.next() >> 11) * 0x1p-53;
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    ASSERT_EQ(g.next(), rad * std::cos(theta));
    ASSERT_EQ(g.next(), rad * std::sin(theta));
  }
}

TEST(GenGaussian, DeterministicAndColumnMajor) {
  const DenseMatrix a = gen_gaussian(1, 2, 5, 4);
  EXPECT_EQ(a, gen_gaussian(1, 2, 5, 4));
  GaussianStream g(1, 2);
  for (Index j = 0; j < 4; ++j)
    for (Index i = 0; i < 5; ++i) ASSERT_EQ(a(i, j), g.next());
  EXPECT_TRUE(a.all_finite());
}

TEST(GenGaussian, StreamsAndSeedsDiffer) {
  const DenseMatrix a = gen_gaussian(1, 2, 8, 1);
  EXPECT_NE(a, gen_gaussian(1, 3, 8, 1));
  EXPECT_NE(a, gen_gaussian(2, 2, 8, 1));
}

TEST(GenGaussian, MomentsOverMillionDraws) {
  GaussianStream g(2024, 11);
  constexpr int kDraws = 1'000'000;
  double sum = 0.0, sum_sq = 0.0;
  for (int k = 0; k < kDraws; ++k) {
    const double z = g.next();
    sum += z;
    sum_sq += z * z;
  }
  const double mean = sum / kDraws;
  const double var = sum_sq / kDraws - mean * mean;
  EXPECT_LT(std::abs(mean), 5e-3);
  EXPECT_LT(std::abs(var - 1.0), 1e-2);
}

TEST(StreamId, BitLayout) {
  EXPECT_EQ(stream_id(0, 0, 0, StreamRole::a), 0u);
  EXPECT_EQ(stream_id(1, 0, 0, StreamRole::b), (1ULL << 40) | 1);
  EXPECT_EQ(stream_id(3, 2, 5, StreamRole::v), (3ULL << 40) | (2ULL << 24) | (5ULL << 4) | 3);

  std::set<std::uint64_t> ids;
  for (Index n : {10, 100})
    for (Index r : {1, 2})
      for (Index rep = 0; rep < 3; ++rep)
        for (auto role : {StreamRole::a, StreamRole::b, StreamRole::u, StreamRole::v})
          ids.insert(stream_id(n, r, rep, role));
  EXPECT_EQ(ids.size(), 2u * 2 * 3 * 4);

  EXPECT_THROW(stream_id(Index{1} << 24, 1, 0, StreamRole::a), std::out_of_range);
  EXPECT_THROW(stream_id(1, Index{1} << 16, 0, StreamRole::a), std::out_of_range);
  EXPECT_THROW(stream_id(1, 1, Index{1} << 20, StreamRole::a), std::out_of_range);
}

TEST(BenchConfig, Validation) {
  EXPECT_NO_THROW(validate(small_config()));
  auto bad = small_config();
  bad.m = 15;
  EXPECT_THROW(validate(bad), std::invalid_argument);
  bad = small_config();
  bad.r_list = {11};
  EXPECT_THROW(validate(bad), std::invalid_argument);
  bad = small_config();
  bad.reps = 0;
  EXPECT_THROW(validate(bad), std::invalid_argument);
  bad = small_config();
  bad.n_list.clear();
  EXPECT_THROW(validate(bad), std::invalid_argument);
  bad = small_config();
  bad.r_list = {0};
  EXPECT_THROW(validate(bad), std::invalid_argument);
}

TEST(RunBenchmark, RecordsAreCompleteAndReproducible) {
  int calls = 0;
  const auto first = run_benchmark(small_config(), [&](const BenchRecord&) { ++calls; });
  const auto second = run_benchmark(small_config());
  ASSERT_EQ(first.size(), 8u);
  EXPECT_EQ(calls, 8);
  for (std::size_t k = 0; k < first.size(); ++k) {
    const auto& a = first[k];
    const auto& b = second[k];
    EXPECT_EQ(std::tie(a.m, a.n, a.r, a.rep, a.seed), std::tie(b.m, b.n, b.r, b.rep, b.seed));
    EXPECT_EQ(a.rel_forward_error, b.rel_forward_error);
    EXPECT_LT(a.rel_forward_error, 1e-10);
    EXPECT_GT(a.t_scratch_ns, 0);
    EXPECT_GT(a.t_woodbury_ns, 0);
    EXPECT_DOUBLE_EQ(a.speedup, static_cast<double>(a.t_scratch_ns) /
                                    static_cast<double>(a.t_woodbury_ns));
  }
  EXPECT_EQ(first[0].n, 10);
  EXPECT_EQ(first[0].r, 1);
  EXPECT_EQ(first[3].r, 3);
  EXPECT_EQ(first[3].rep, 1);
  EXPECT_EQ(first[4].n, 20);
}

TEST(RunBenchmark, WritesCsvWhenAsked) {
  auto cfg = small_config();
  cfg.n_list = {10};
  cfg.r_list = {2};
  cfg.reps = 1;
  cfg.out_path = std::filesystem::temp_directory_path() / "wls_bench_test.csv";
  const auto recs = run_benchmark(cfg);
  EXPECT_EQ(read_bench_csv(cfg.out_path), recs);
  std::filesystem::remove(cfg.out_path);
}

TEST(RunBenchmark, FailureCarriesInstanceContext) {
  // m = n with a tiny CG budget cannot converge.
  BenchConfig cfg;
  cfg.m = 40;
  cfg.n_list = {40};
  cfg.r_list = {1};
  cfg.backend = Backend::cg;
  cfg.cg.max_iters = 1;
  try {
    run_benchmark(cfg);
    FAIL() << "expected failure";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("n=40"), std::string::npos);
    try {
      std::rethrow_if_nested(e);
      FAIL() << "expected nested exception";
    } catch (const ConvergenceFailure&) {
    }
  }
}

TEST(MedianSpeedup, OddEvenAndMissing) {
  std::vector<BenchRecord> recs(4);
  for (int k = 0; k < 4; ++k) {
    recs[k].n = 10;
    recs[k].r = 1;
    recs[k].speedup = 1.0 + k * k;  // 1, 2, 5, 10
  }
  EXPECT_DOUBLE_EQ(median_speedup(recs, 10, 1), 3.5);
  recs.pop_back();
  EXPECT_DOUBLE_EQ(median_speedup(recs, 10, 1), 2.0);
  EXPECT_TRUE(std::isnan(median_speedup(recs, 10, 2)));
}
