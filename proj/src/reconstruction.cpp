#include "spi/reconstruction.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <stdexcept>

#include "spi/parallel.hpp"

namespace spi {

Reconstruction reconstruct(const PatternSet& patterns, const MeasurementSeries& series,
                           unsigned threads) {
  const std::size_t shots = patterns.count();
  if (series.size() != shots) {
    throw std::invalid_argument("length mismatch: " + std::to_string(series.size()) +
                                " bucket values for " + std::to_string(shots) + " patterns");
  }
  const std::size_t pixels = patterns.pixels();
  const double inv_k = 1.0 / static_cast<double>(shots);
  std::vector<double> image(pixels);

  parallel_for(pixels, threads, [&](std::size_t begin, std::size_t end) {
    const std::size_t width = end - begin;
    std::vector<double> mean(width, 0.0);
    for (std::size_t i = 0; i < shots; ++i) {
      const auto p = patterns.pattern(i);
      for (std::size_t x = 0; x < width; ++x) mean[x] += p[begin + x];
    }
    for (double& m : mean) m /= static_cast<double>(shots);

    std::vector<double> acc(width, 0.0);
    for (std::size_t i = 0; i < shots; ++i) {
      const auto p = patterns.pattern(i);
      const double b = series.bucket[i];
      for (std::size_t x = 0; x < width; ++x) acc[x] += (p[begin + x] - mean[x]) * b;
    }
    for (std::size_t x = 0; x < width; ++x) image[begin + x] = acc[x] * inv_k;
  });

  Reconstruction rec{ImageGrid::square(patterns.side(), std::move(image)), series.method, {}};
  if (patterns.is_full_hadamard()) rec.excluded_pixels = {0};
  return rec;
}

MeasurementSeries correct_series(const MeasurementSeries& series) {
  if (!series.monitor) throw std::invalid_argument("correct_series: series has no monitor values");
  const auto& monitor = *series.monitor;
  if (monitor.size() != series.size()) {
    throw std::invalid_argument("correct_series: monitor/bucket length mismatch");
  }
  double total = 0.0;
  for (double m : monitor) {
    if (!(m > 0.0)) throw std::invalid_argument("correct_series: monitor value <= 0");
    total += m;
  }
  MeasurementSeries out = series;
  out.method = Method::spc_corrected;
  // A constant monitor carries no fluctuation; rounding in its mean must not perturb the buckets.
  if (std::adjacent_find(monitor.begin(), monitor.end(), std::not_equal_to<>{}) == monitor.end()) {
    return out;
  }
  const double mean = total / static_cast<double>(monitor.size());
  for (std::size_t i = 0; i < out.bucket.size(); ++i) {
    out.bucket[i] = series.bucket[i] * (mean / monitor[i]);
  }
  return out;
}

ImageGrid normalize_to_gray(const ImageGrid& grid, const std::vector<std::size_t>& excluded) {
  const std::size_t n = grid.size();
  std::vector<bool> skip(n, false);
  for (std::size_t idx : excluded) {
    if (idx >= n) throw std::invalid_argument("excluded pixel index out of range");
    skip[idx] = true;
  }

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    if (skip[i]) continue;
    lo = std::min(lo, grid[i]);
    hi = std::max(hi, grid[i]);
  }
  if (!(hi > lo)) throw std::invalid_argument("degenerate reconstruction (constant values)");

  const double range = hi - lo;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!skip[i]) out[i] = (grid[i] - lo) / range * 255.0;
  }

  const std::size_t w = grid.width();
  for (std::size_t idx : excluded) {
    const auto ex = static_cast<long long>(idx % w);
    const auto ey = static_cast<long long>(idx / w);
    std::size_t best = n;
    long long best_d2 = std::numeric_limits<long long>::max();
    for (std::size_t j = 0; j < n; ++j) {
      if (skip[j]) continue;
      const long long dx = static_cast<long long>(j % w) - ex;
      const long long dy = static_cast<long long>(j / w) - ey;
      const long long d2 = dx * dx + dy * dy;
      if (d2 < best_d2) {
        best_d2 = d2;
        best = j;
      }
    }
    out[idx] = out[best];
  }
  return ImageGrid(grid.width(), grid.height(), std::move(out));
}

ImageGrid normalize_to_gray(const Reconstruction& rec) {
  return normalize_to_gray(rec.grid, rec.excluded_pixels);
}

}  // namespace spi
