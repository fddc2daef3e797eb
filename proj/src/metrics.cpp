#include "spi/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace spi {

namespace {

std::size_t checked_used(const ImageGrid& a, const ImageGrid& b,
                         const std::vector<std::size_t>& excluded, std::vector<bool>& skip) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw std::invalid_argument("metric dimension mismatch");
  }
  skip.assign(a.size(), false);
  std::size_t dropped = 0;
  for (std::size_t idx : excluded) {
    if (idx >= a.size()) throw std::invalid_argument("excluded pixel index out of range");
    if (!skip[idx]) ++dropped;
    skip[idx] = true;
  }
  if (dropped >= a.size()) throw std::invalid_argument("all pixels excluded");
  return a.size() - dropped;
}

}  // namespace

double mse(const ImageGrid& a, const ImageGrid& b, const std::vector<std::size_t>& excluded) {
  std::vector<bool> skip;
  const std::size_t used = checked_used(a, b, excluded, skip);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (skip[i]) continue;
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum / static_cast<double>(used);
}

double psnr_from_mse(double mse_value, int p_bits) {
  if (mse_value < 0.0) throw std::invalid_argument("negative MSE");
  if (mse_value == 0.0) return std::numeric_limits<double>::infinity();
  const double peak = std::ldexp(1.0, p_bits) - 1.0;
  return 10.0 * std::log10(peak * peak / mse_value);
}

double psnr(const ImageGrid& a, const ImageGrid& b, int p_bits,
            const std::vector<std::size_t>& excluded) {
  return psnr_from_mse(mse(a, b, excluded), p_bits);
}

QualityScore score(const ImageGrid& reconstruction, const ImageGrid& reference, int p_bits,
                   const std::vector<std::size_t>& excluded) {
  std::vector<bool> skip;
  const std::size_t used = checked_used(reconstruction, reference, excluded, skip);
  const double m = mse(reconstruction, reference, excluded);
  return {m, psnr_from_mse(m, p_bits), used, p_bits};
}

std::string format_db(double db) {
  if (std::isinf(db)) return db > 0 ? "inf" : "-inf";
  if (std::isnan(db)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", db);
  return buf;
}

}  // namespace spi
