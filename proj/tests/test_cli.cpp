#include <gtest/gtest.h>

#include <filesystem>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "wls/bench.hpp"
#include "wls/matrix_io.hpp"

using namespace wls;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("wls_cli_" + std::string(::testing::UnitTest::GetInstance()
                                         ->current_test_info()
                                         ->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string put(const std::string& name, const DenseMatrix& m) {
    const auto p = dir_ / name;
    write_matrix(p, m);
    return p.string();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run(std::initializer_list<std::string> args) {
    std::vector<std::string> storage{"wls"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& s : storage) argv.push_back(s.c_str());
    out_.str("");
    err_.str("");
    return cli::cli_main(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  // The 3x2 worked instance; x = [4, 4].
  void write_worked_instance() {
    put("a.mtx", DenseMatrix::from_rows({{1, 0}, {0, 1}, {0, 0}}));
    put("b.mtx", DenseMatrix::from_rows({{3}, {4}, {5}}));
    put("u.mtx", DenseMatrix::from_rows({{0}, {0}, {1}}));
    put("v.mtx", DenseMatrix::from_rows({{1}, {0}}));
  }

  int solve(std::initializer_list<std::string> extra = {}) {
    std::vector<std::string> args{"solve", "--a", path("a.mtx"), "--b", path("b.mtx"),
                                  "--u", path("u.mtx"), "--v", path("v.mtx"),
                                  "--out", path("x.mtx")};
    args.insert(args.end(), extra.begin(), extra.end());
    std::vector<const char*> argv{"wls"};
    for (const auto& s : args) argv.push_back(s.c_str());
    out_.str("");
    err_.str("");
    return cli::cli_main(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

}  // namespace

TEST_F(CliTest, SolveWorkedInstance) {
  write_worked_instance();
  ASSERT_EQ(solve(), cli::kOk) << err_.str();
  const DenseMatrix x = read_matrix(path("x.mtx"));
  ASSERT_EQ(x.rows(), 2);
  EXPECT_NEAR(x(0, 0), 4.0, 1e-14);
  EXPECT_NEAR(x(1, 0), 4.0, 1e-14);
  EXPECT_NE(out_.str().find("capacitance rcond"), std::string::npos);
}

TEST_F(CliTest, SolveWithCgBackendAndX0) {
  write_worked_instance();
  put("x0.mtx", DenseMatrix::from_rows({{3}, {4}}));
  ASSERT_EQ(solve({"--backend", "cg", "--x0", path("x0.mtx")}), cli::kOk) << err_.str();
  const DenseMatrix x = read_matrix(path("x.mtx"));
  EXPECT_NEAR(x(0, 0), 4.0, 1e-12);
  EXPECT_NEAR(x(1, 0), 4.0, 1e-12);
}

TEST_F(CliTest, SolveWithoutRefinement) {
  write_worked_instance();
  ASSERT_EQ(solve({"--refine-steps", "0"}), cli::kOk) << err_.str();
  EXPECT_NEAR(read_matrix(path("x.mtx"))(0, 0), 4.0, 1e-14);
  EXPECT_EQ(solve({"--refine-steps", "-1"}), cli::kUsage);
}

TEST_F(CliTest, MissingFlagIsUsageError) {
  write_worked_instance();
  EXPECT_EQ(run({"solve", "--a", path("a.mtx")}), cli::kUsage);
  EXPECT_NE(err_.str().find("wls:"), std::string::npos);
  EXPECT_EQ(run({}), cli::kUsage);
  EXPECT_EQ(solve({"--backend", "lu"}), cli::kUsage);
}

TEST_F(CliTest, HelpExitsCleanly) {
  EXPECT_EQ(run({"--help"}), cli::kOk);
  EXPECT_NE(out_.str().find("solve"), std::string::npos);
}

TEST_F(CliTest, ErrorExitCodes) {
  write_worked_instance();
  // Missing input file.
  fs::remove(path("b.mtx"));
  EXPECT_EQ(solve(), cli::kIo);
  EXPECT_NE(err_.str().find("wls: error:"), std::string::npos);

  // b of the wrong length.
  put("b.mtx", DenseMatrix::from_rows({{3}, {4}}));
  EXPECT_EQ(solve(), cli::kDimension);

  // Update that removes a column: A + UV^T has rank 1.
  put("b.mtx", DenseMatrix::from_rows({{3}, {4}, {5}}));
  put("u.mtx", DenseMatrix::from_rows({{-1}, {0}, {0}}));
  EXPECT_EQ(solve(), cli::kSingularCapacitance);

  // Rank-deficient A.
  write_worked_instance();
  put("a.mtx", DenseMatrix::from_rows({{1, 1}, {1, 1}, {0, 0}}));
  EXPECT_EQ(solve(), cli::kRankDeficient);

  // CG budget too small.
  put("a.mtx", gen_gaussian(3, 3, 3, 2));
  EXPECT_EQ(solve({"--backend", "cg", "--cg-max-iters", "1"}), cli::kNoConvergence);
}

TEST_F(CliTest, BenchWritesParseableCsv) {
  ASSERT_EQ(run({"bench", "--m", "50", "--n-list", "10,20", "--r-list", "1,2",
                 "--reps", "2", "--seed", "7", "--out", path("bench.csv")}),
            cli::kOk)
      << err_.str();
  const auto recs = read_bench_csv(fs::path(path("bench.csv")));
  ASSERT_EQ(recs.size(), 8u);
  for (const auto& rec : recs) {
    EXPECT_EQ(rec.m, 50);
    EXPECT_EQ(rec.seed, 7u);
    EXPECT_LT(rec.rel_forward_error, 1e-10);
  }
  EXPECT_NE(out_.str().find("median speedup"), std::string::npos);
}

TEST_F(CliTest, BenchRejectsInconsistentSizes) {
  EXPECT_EQ(run({"bench", "--m", "10", "--n-list", "20", "--r-list", "1", "--reps",
                 "1", "--seed", "1", "--out", path("bench.csv")}),
            cli::kUsage);
  EXPECT_FALSE(fs::exists(path("bench.csv")));
}
