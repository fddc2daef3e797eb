#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace spi {

// Dense +/-1 matrix, row-major.
struct SignMatrix {
  std::size_t order = 0;
  std::vector<std::int8_t> entries;

  std::int8_t at(std::size_t row, std::size_t col) const { return entries[row * order + col]; }
};

// Sylvester construction: H_1 = [1], H_2n = [[H, H], [H, -H]].
SignMatrix sylvester_hadamard(std::size_t order);

enum class PatternKind { hadamard, random };

// K binary masks of N x N pixels, stored contiguously pattern after pattern.
class PatternSet {
 public:
  PatternSet(std::size_t side, PatternKind kind, std::uint64_t seed,
             std::vector<std::uint8_t> masks);

  std::size_t side() const { return side_; }
  std::size_t pixels() const { return side_ * side_; }
  std::size_t count() const { return count_; }
  PatternKind kind() const { return kind_; }
  std::uint64_t seed() const { return seed_; }

  std::span<const std::uint8_t> pattern(std::size_t index) const {
    return {masks_.data() + index * pixels(), pixels()};
  }
  std::span<const std::uint8_t> masks() const { return masks_; }

  // True for a complete Sylvester set (count == side^2), whose all-ones
  // row couples the DC term into reconstruction pixel 0.
  bool is_full_hadamard() const { return kind_ == PatternKind::hadamard && count_ == pixels(); }

 private:
  std::size_t side_;
  std::size_t count_;
  PatternKind kind_;
  std::uint64_t seed_;
  std::vector<std::uint8_t> masks_;
};

// Row i of the order-N^2 Sylvester matrix mapped by (h + 1) / 2 and reshaped
// row-major to N x N. N must be a power of two.
PatternSet hadamard_pattern_set(std::size_t side);

// i.i.d. Bernoulli(1/2) entries drawn from the counter stream.
PatternSet random_pattern_set(std::size_t side, std::size_t count, std::uint64_t seed);

}  // namespace spi
