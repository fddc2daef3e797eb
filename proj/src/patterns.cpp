#include "spi/patterns.hpp"

#include <bit>
#include <stdexcept>
#include <string>

#include "spi/rng.hpp"

namespace spi {

SignMatrix sylvester_hadamard(std::size_t order) {
  if (order == 0 || !std::has_single_bit(order)) {
    throw std::invalid_argument("Hadamard order must be a power of two, got " +
                                std::to_string(order));
  }
  SignMatrix h{order, std::vector<std::int8_t>(order * order)};
  h.entries[0] = 1;
  for (std::size_t n = 1; n < order; n *= 2) {
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) {
        const std::int8_t v = h.entries[r * order + c];
        h.entries[r * order + c + n] = v;
        h.entries[(r + n) * order + c] = v;
        h.entries[(r + n) * order + c + n] = static_cast<std::int8_t>(-v);
      }
    }
  }
  return h;
}

PatternSet::PatternSet(std::size_t side, PatternKind kind, std::uint64_t seed,
                       std::vector<std::uint8_t> masks)
    : side_(side), count_(0), kind_(kind), seed_(seed), masks_(std::move(masks)) {
  if (side_ == 0 || masks_.size() % pixels() != 0) {
    throw std::invalid_argument("PatternSet: mask storage is not a whole number of patterns");
  }
  count_ = masks_.size() / pixels();
  if (count_ == 0) throw std::invalid_argument("PatternSet: empty");
  for (auto m : masks_) {
    if (m > 1) throw std::invalid_argument("PatternSet: mask values must be 0 or 1");
  }
}

PatternSet hadamard_pattern_set(std::size_t side) {
  if (side == 0 || !std::has_single_bit(side)) {
    throw std::invalid_argument("Hadamard pattern side must be a power of two, got " +
                                std::to_string(side));
  }
  const SignMatrix h = sylvester_hadamard(side * side);
  std::vector<std::uint8_t> masks(h.entries.size());
  for (std::size_t i = 0; i < masks.size(); ++i) {
    masks[i] = static_cast<std::uint8_t>((h.entries[i] + 1) / 2);
  }
  return PatternSet(side, PatternKind::hadamard, 0, std::move(masks));
}

PatternSet random_pattern_set(std::size_t side, std::size_t count, std::uint64_t seed) {
  if (side == 0 || count == 0) throw std::invalid_argument("random patterns need side, count >= 1");
  const std::size_t pixels = side * side;
  const CounterStream stream(seed);
  std::vector<std::uint8_t> masks(pixels * count);
  for (std::size_t k = 0; k < count; ++k) {
    // One block supplies 128 mask bits.
    for (std::size_t chunk = 0; chunk * 128 < pixels; ++chunk) {
      const auto block =
          stream.block(StreamPurpose::random_patterns, static_cast<std::uint32_t>(k), chunk);
      const std::size_t end = std::min(pixels, (chunk + 1) * 128);
      for (std::size_t p = chunk * 128; p < end; ++p) {
        const std::size_t bit = p - chunk * 128;
        masks[k * pixels + p] = static_cast<std::uint8_t>((block[bit / 32] >> (bit % 32)) & 1u);
      }
    }
  }
  return PatternSet(side, PatternKind::random, seed, std::move(masks));
}

}  // namespace spi
