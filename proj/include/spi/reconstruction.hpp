#pragma once

#include <cstddef>
#include <vector>

#include "spi/detection.hpp"
#include "spi/patterns.hpp"
#include "spi/scene.hpp"

namespace spi {

struct Reconstruction {
  ImageGrid grid;  // signed correlation values
  Method method = Method::cgi;
  // Pixels left out of normalization and scoring. {0} for a complete
  // Hadamard set, empty otherwise.
  std::vector<std::size_t> excluded_pixels;
};

// O(x) = (1/K) sum_i (P_i(x) - <P(x)>) B_i, accumulated per pixel in
// ascending shot order. Pixels are split across threads, so the output is
// bit-identical for any thread count.
Reconstruction reconstruct(const PatternSet& patterns, const MeasurementSeries& series,
                           unsigned threads = 1);

// B~_i = B_i * mean(M) / M_i. Requires monitor values, all > 0.
MeasurementSeries correct_series(const MeasurementSeries& series);

// Min-max maps the non-excluded values onto [0, 255]; excluded pixels copy
// their nearest non-excluded neighbour (ties go to the lowest row-major
// index). Throws on a constant reconstruction.
ImageGrid normalize_to_gray(const Reconstruction& rec);

// Same mapping applied to an arbitrary grid with an exclusion set.
ImageGrid normalize_to_gray(const ImageGrid& grid, const std::vector<std::size_t>& excluded);

}  // namespace spi
