#include "wls/matrix_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>

#include "wls/errors.hpp"

namespace wls {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

template <typename T>
bool parse_int(std::string_view tok, T& out) {
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

double parse_value(std::string_view tok, std::size_t index) {
  // from_chars rejects a leading '+', which some writers emit.
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec == std::errc::result_out_of_range) {
    throw NonFiniteValue("read_matrix: value " + std::to_string(index) +
                         " out of double range: " + std::string(tok));
  }
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw IoError("read_matrix: cannot parse value " + std::to_string(index) +
                  ": '" + std::string(tok) + "'");
  }
  if (!std::isfinite(v)) {
    throw NonFiniteValue("read_matrix: value " + std::to_string(index) +
                         " is not finite");
  }
  return v;
}

void append_double(std::string& out, double v) {
  char buf[32];
  const auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (ec != std::errc()) throw IoError("cannot format value");
  out.append(buf, ptr);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

}  // namespace

DenseMatrix read_matrix(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw MalformedHeader("read_matrix: empty input");
  }
  const auto banner = split_ws(line);
  if (banner.size() != 5 || banner[0] != "%%MatrixMarket" ||
      lower(banner[1]) != "matrix" || lower(banner[2]) != "array" ||
      lower(banner[3]) != "real" || lower(banner[4]) != "general") {
    throw MalformedHeader("read_matrix: expected '" +
                          std::string(kMatrixMarketBanner) + "', got '" + line +
                          "'");
  }

  Index rows = 0;
  Index cols = 0;
  bool have_size = false;
  std::vector<double> values;
  std::size_t expected = 0;

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (blank(line) || line.front() == '%') continue;
    const auto toks = split_ws(line);
    if (!have_size) {
      if (toks.size() != 2 || !parse_int(toks[0], rows) ||
          !parse_int(toks[1], cols) || rows < 1 || cols < 1) {
        throw MalformedHeader("read_matrix: bad size line '" + line + "'");
      }
      have_size = true;
      expected = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
      values.reserve(expected);
      continue;
    }
    for (auto tok : toks) {
      if (values.size() == expected) {
        throw DimensionMismatch("read_matrix: more than the declared " +
                                std::to_string(expected) + " values");
      }
      values.push_back(parse_value(tok, values.size()));
    }
  }
  if (in.bad()) throw IoError("read_matrix: read failure");
  if (!have_size) throw MalformedHeader("read_matrix: missing size line");
  if (values.size() != expected) {
    throw DimensionMismatch("read_matrix: declared " + std::to_string(expected) +
                            " values, found " + std::to_string(values.size()));
  }
  return {rows, cols, std::move(values)};
}

DenseMatrix read_matrix(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_matrix(in);
}

void write_matrix(std::ostream& out, const DenseMatrix& m) {
  if (m.empty()) throw DimensionMismatch("write_matrix: empty matrix");
  std::string text;
  text.reserve(static_cast<std::size_t>(m.size()) * 25 + 64);
  text += kMatrixMarketBanner;
  text += '\n';
  text += std::to_string(m.rows());
  text += ' ';
  text += std::to_string(m.cols());
  text += '\n';
  for (double v : m.values()) {
    append_double(text, v);
    text += '\n';
  }
  out << text;
  if (!out) throw IoError("write_matrix: write failure");
}

void write_matrix(const std::filesystem::path& path, const DenseMatrix& m) {
  auto out = open_out(path);
  write_matrix(out, m);
  out.close();
  if (!out) throw IoError("write_matrix: cannot finish '" + path.string() + "'");
}

void write_bench_csv(std::ostream& out, std::span<const BenchRecord> records) {
  if (records.empty()) {
    throw std::invalid_argument("write_bench_csv: no records");
  }
  std::string text(kBenchCsvHeader);
  text += '\n';
  for (const BenchRecord& rec : records) {
    text += std::to_string(rec.m) + ',' + std::to_string(rec.n) + ',' +
            std::to_string(rec.r) + ',' + std::to_string(rec.rep) + ',' +
            std::to_string(rec.seed) + ',' + std::to_string(rec.t_scratch_ns) +
            ',' + std::to_string(rec.t_woodbury_ns) + ',';
    append_double(text, rec.speedup);
    text += ',';
    append_double(text, rec.rel_forward_error);
    text += '\n';
  }
  out << text;
  if (!out) throw IoError("write_bench_csv: write failure");
}

void write_bench_csv(const std::filesystem::path& path,
                     std::span<const BenchRecord> records) {
  if (records.empty()) {
    throw std::invalid_argument("write_bench_csv: no records");
  }
  auto out = open_out(path);
  write_bench_csv(out, records);
  out.close();
  if (!out) throw IoError("write_bench_csv: cannot finish '" + path.string() + "'");
}

std::vector<BenchRecord> read_bench_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw MalformedHeader("read_bench_csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kBenchCsvHeader) {
    throw MalformedHeader("read_bench_csv: unexpected header '" + line + "'");
  }

  std::vector<BenchRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::vector<std::string_view> f;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      f.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    const auto bad = [&](const char* what) {
      return IoError("read_bench_csv: line " + std::to_string(lineno) + ": " + what);
    };
    if (f.size() != 9) throw bad("expected 9 fields");

    BenchRecord rec;
    if (!parse_int(f[0], rec.m) || !parse_int(f[1], rec.n) ||
        !parse_int(f[2], rec.r) || !parse_int(f[3], rec.rep) ||
        !parse_int(f[4], rec.seed) || !parse_int(f[5], rec.t_scratch_ns) ||
        !parse_int(f[6], rec.t_woodbury_ns)) {
      throw bad("bad integer field");
    }
    const auto parse_real = [&](std::string_view tok, double& v) {
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw bad("bad real field");
      }
    };
    parse_real(f[7], rec.speedup);
    parse_real(f[8], rec.rel_forward_error);
    out.push_back(rec);
  }
  return out;
}

std::vector<BenchRecord> read_bench_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_bench_csv(in);
}

}  // namespace wls
