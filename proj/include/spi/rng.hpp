#pragma once

// Counter-based random stream (Philox4x32-10, Salmon et al. 2011).
//
// Every draw is a pure function of (seed, counter). Callers build the
// counter from the logical coordinates of the draw (shot, pixel, purpose)
// so results never depend on evaluation order or thread count.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace spi {

using Philox4x32Block = std::array<std::uint32_t, 4>;
using Philox4x32Key = std::array<std::uint32_t, 2>;

constexpr Philox4x32Block philox4x32_10(Philox4x32Block ctr, Philox4x32Key key) {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
  }
  return ctr;
}

// Purpose tags occupy the top counter word so that streams used for
// different quantities never overlap.
enum class StreamPurpose : std::uint32_t {
  spatial_disturbance = 1,
  intensity_fluctuation = 2,
  random_patterns = 3,
};

// Full 128-bit counter for one draw. Injective in (purpose, major, minor).
constexpr Philox4x32Block stream_counter(StreamPurpose purpose, std::uint32_t major,
                                         std::uint64_t minor) {
  return {static_cast<std::uint32_t>(minor), static_cast<std::uint32_t>(minor >> 32), major,
          static_cast<std::uint32_t>(purpose)};
}

class CounterStream {
 public:
  explicit constexpr CounterStream(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  constexpr Philox4x32Block block(StreamPurpose purpose, std::uint32_t major,
                                  std::uint64_t minor) const {
    return philox4x32_10(stream_counter(purpose, major, minor), key_);
  }

  // Uniform on [0,1) with 53 random bits from the first two words.
  double uniform(StreamPurpose purpose, std::uint32_t major, std::uint64_t minor) const {
    return to_unit(block(purpose, major, minor), 0);
  }

  // Standard normal via Box-Muller on one block.
  double normal(StreamPurpose purpose, std::uint32_t major, std::uint64_t minor) const {
    const auto b = block(purpose, major, minor);
    const double u1 = to_unit(b, 0);
    const double u2 = to_unit(b, 2);
    return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  static constexpr double to_unit(const Philox4x32Block& b, int first) {
    const std::uint64_t bits =
        (std::uint64_t{b[first + 1]} << 32 | b[first]) >> 11;
    return static_cast<double>(bits) * 0x1.0p-53;
  }

 private:
  Philox4x32Key key_;
};

}  // namespace spi
