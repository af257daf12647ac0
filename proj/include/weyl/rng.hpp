#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace weyl {

// Philox4x32-10 (Salmon et al., SC'11).
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
  constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t(M0) * ctr[0];
    const std::uint64_t p1 = std::uint64_t(M1) * ctr[2];
    ctr = {std::uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], std::uint32_t(p1),
           std::uint32_t(p0 >> 32) ^ ctr[3] ^ key[1], std::uint32_t(p0)};
    key[0] += W0;
    key[1] += W1;
  }
  return ctr;
}

inline double to_unit_open(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((std::uint64_t(hi) << 32) | lo) >> 11;
  return (double(bits) + 0.5) * 0x1.0p-53;
}

/// Stateless normal variates addressed by (stream, step, component).
class CounterNormal {
 public:
  explicit CounterNormal(std::uint64_t seed)
      : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)} {}

  double operator()(std::uint64_t stream, std::uint64_t step, std::uint32_t comp) const {
    const auto w = philox4x32({comp / 2, std::uint32_t(step), std::uint32_t(stream),
                               std::uint32_t(stream >> 32) ^ (std::uint32_t(step >> 32) << 16)},
                              key_);
    const double u1 = to_unit_open(w[0], w[1]);
    const double u2 = to_unit_open(w[2], w[3]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    return (comp % 2 == 0) ? r * std::cos(a) : r * std::sin(a);
  }

 private:
  std::array<std::uint32_t, 2> key_;
};

/// Sequential generator on top of Philox; used by samplers and checkers.
class Stream {
 public:
  explicit Stream(std::uint64_t seed, std::uint64_t stream = 0)
      : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)}, stream_(stream) {}

  double uniform() {
    if (pos_ == 4) refill();
    const double u = to_unit_open(buf_[pos_], buf_[pos_ + 1]);
    pos_ += 2;
    return u;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() {
    const double u1 = uniform(), u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }
  int index(int n) {
    const int k = int(uniform() * n);
    return k < n ? k : n - 1;
  }

 private:
  void refill() {
    buf_ = philox4x32({std::uint32_t(counter_), std::uint32_t(counter_ >> 32),
                       std::uint32_t(stream_), std::uint32_t(stream_ >> 32)},
                      key_);
    ++counter_;
    pos_ = 0;
  }

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
};

}  // namespace weyl
