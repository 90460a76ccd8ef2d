#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "wls/dense_matrix.hpp"

namespace wls {

// MatrixMarket dense array files:
//
//   %%MatrixMarket matrix array real general
//   % optional comment lines
//   <rows> <cols>
//   <value>            one per line, column-major, rows*cols lines
//
// Values are written with 17 significant digits so a write/read round trip
// reproduces every finite double exactly.

inline constexpr std::string_view kMatrixMarketBanner =
    "%%MatrixMarket matrix array real general";

/// Throws MalformedHeader, DimensionMismatch, NonFiniteValue or IoError.
DenseMatrix read_matrix(const std::filesystem::path& path);
DenseMatrix read_matrix(std::istream& in);

void write_matrix(const std::filesystem::path& path, const DenseMatrix& m);
void write_matrix(std::ostream& out, const DenseMatrix& m);

/// One timed scratch-vs-update comparison.
struct BenchRecord {
  std::int64_t m = 0;
  std::int64_t n = 0;
  std::int64_t r = 0;
  std::int64_t rep = 0;
  std::uint64_t seed = 0;
  std::int64_t t_scratch_ns = 0;
  std::int64_t t_woodbury_ns = 0;
  double speedup = 0.0;            // t_scratch_ns / t_woodbury_ns
  double rel_forward_error = 0.0;  // ||x2 - x1|| / ||x1||

  friend bool operator==(const BenchRecord&, const BenchRecord&) = default;
};

inline constexpr std::string_view kBenchCsvHeader =
    "m,n,r,rep,seed,t_scratch_ns,t_woodbury_ns,speedup,rel_forward_error";

/// Header line then one row per record, in the given order. Throws
/// std::invalid_argument on an empty list, IoError on write failure.
void write_bench_csv(const std::filesystem::path& path,
                     std::span<const BenchRecord> records);
void write_bench_csv(std::ostream& out, std::span<const BenchRecord> records);

/// Parses a file produced by write_bench_csv. Throws MalformedHeader when the
/// header differs from kBenchCsvHeader.
std::vector<BenchRecord> read_bench_csv(const std::filesystem::path& path);
std::vector<BenchRecord> read_bench_csv(std::istream& in);

}  // namespace wls
