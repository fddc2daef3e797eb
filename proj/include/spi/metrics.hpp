#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "spi/scene.hpp"

namespace spi {

struct QualityScore {
  double mse = 0.0;      // gray-level^2
  double psnr_db = 0.0;  // +inf when mse == 0
  std::size_t n_pixels_used = 0;
  int p_bits = 8;
};

// Mean squared error over the pixels not listed in `excluded`.
double mse(const ImageGrid& a, const ImageGrid& b, const std::vector<std::size_t>& excluded = {});

// 10 log10((2^p - 1)^2 / MSE); +inf for a perfect match.
double psnr(const ImageGrid& a, const ImageGrid& b, int p_bits = 8,
            const std::vector<std::size_t>& excluded = {});

double psnr_from_mse(double mse_value, int p_bits = 8);

QualityScore score(const ImageGrid& reconstruction, const ImageGrid& reference, int p_bits = 8,
                   const std::vector<std::size_t>& excluded = {});

// "inf" for +infinity, otherwise fixed with 4 decimals.
std::string format_db(double db);

}  // namespace spi
