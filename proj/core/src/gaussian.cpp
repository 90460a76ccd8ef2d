#include <cmath>
#include <numbers>

#include "wls/bench.hpp"

namespace wls {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;

}  // namespace

GaussianStream::GaussianStream(std::uint64_t seed, std::uint64_t stream_id) {
  std::uint64_t a = seed;
  std::uint64_t b = stream_id ^ 0xD1B54A32D192ED03ULL;
  std::uint64_t state = splitmix64(a) ^ rotl(splitmix64(b), 17);
  for (auto& word : s_) word = splitmix64(state);
}

// xoshiro256**
std::uint64_t GaussianStream::next_u64() noexcept {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double GaussianStream::next() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = static_cast<double>((next_u64() >> 11) + 1) * kTwoPow53Inv;
  const double u2 = static_cast<double>(next_u64() >> 11) * kTwoPow53Inv;
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

DenseMatrix gen_gaussian(std::uint64_t seed, std::uint64_t stream_id, Index rows,
                         Index cols) {
  DenseMatrix out(rows, cols);
  GaussianStream g(seed, stream_id);
  for (double& v : out.values()) v = g.next();
  return out;
}

}  // namespace wls
