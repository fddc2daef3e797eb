#include "spi/disturbance.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "spi/rng.hpp"

namespace spi {

std::string_view to_string(DisturbanceKind kind) {
  switch (kind) {
    case DisturbanceKind::none: return "none";
    case DisturbanceKind::global_spatial: return "global_spatial";
    case DisturbanceKind::local_spatial: return "local_spatial";
    case DisturbanceKind::intensity_fluctuation: return "intensity_fluctuation";
    case DisturbanceKind::composite: return "composite";
  }
  return "?";
}

DisturbanceKind parse_disturbance_kind(std::string_view text) {
  if (text == "none") return DisturbanceKind::none;
  if (text == "global_spatial" || text == "global") return DisturbanceKind::global_spatial;
  if (text == "local_spatial" || text == "local") return DisturbanceKind::local_spatial;
  if (text == "intensity_fluctuation" || text == "intensity")
    return DisturbanceKind::intensity_fluctuation;
  if (text == "composite") return DisturbanceKind::composite;
  throw std::invalid_argument("unknown disturbance kind '" + std::string(text) + "'");
}

std::string_view to_string(LocalPower mode) {
  return mode == LocalPower::field_mean ? "field_mean" : "per_pixel";
}

LocalPower parse_local_power(std::string_view text) {
  if (text == "field_mean") return LocalPower::field_mean;
  if (text == "per_pixel") return LocalPower::per_pixel;
  throw std::invalid_argument("unknown local_power '" + std::string(text) +
                              "' (expected field_mean or per_pixel)");
}

Roi default_roi(std::size_t side) {
  const auto w = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(static_cast<double>(side) * 0.2)));
  const std::size_t clamped = std::min(w, side > 1 ? side - 1 : 1);
  const std::size_t offset = (side - clamped) / 2;
  return {offset, offset, clamped, clamped};
}

void DisturbanceModel::validate(std::size_t side) const {
  if (!std::isfinite(epsilon_db)) throw std::invalid_argument("epsilon_db must be finite");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be >= 0");
  if (!std::isfinite(fluct_mean)) throw std::invalid_argument("fluct_mean must be finite");
  if (kind == DisturbanceKind::local_spatial) {
    const Roi r = roi.value_or(default_roi(side));
    if (r.w == 0 || r.h == 0 || r.x0 + r.w > side || r.y0 + r.h > side) {
      throw std::invalid_argument("roi lies outside the " + std::to_string(side) + "x" +
                                  std::to_string(side) + " grid");
    }
    if (r.area() >= side * side) {
      throw std::invalid_argument("local roi must be smaller than the grid");
    }
  }
}

std::string DisturbanceModel::canonical() const {
  std::ostringstream out;
  out.precision(17);
  out << to_string(kind) << ";eps=" << epsilon_db << ";gamma=" << gamma
      << ";fluct_mean=" << fluct_mean << ";local_power=" << to_string(local_power);
  if (roi) out << ";roi=" << roi->x0 << "," << roi->y0 << "," << roi->w << "," << roi->h;
  return out.str();
}

double epsilon_to_noise_mean(double epsilon_db, double signal_mean) {
  return signal_mean / std::pow(10.0, epsilon_db / 10.0);
}

void fill_disturbance(const DisturbanceModel& model, std::size_t shot_index, std::uint64_t seed,
                      const FieldContext& context, std::span<double> out) {
  const std::size_t side = context.side;
  if (out.size() != side * side) throw std::invalid_argument("disturbance buffer size mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  if (model.kind == DisturbanceKind::none) return;

  const CounterStream stream(seed);
  const auto shot = static_cast<std::uint32_t>(shot_index);

  if (model.kind == DisturbanceKind::global_spatial || model.kind == DisturbanceKind::composite) {
    const double upper = 2.0 * epsilon_to_noise_mean(model.epsilon_db, context.signal_mean);
    for (std::size_t p = 0; p < out.size(); ++p) {
      out[p] = upper * stream.uniform(StreamPurpose::spatial_disturbance, shot, p);
    }
  } else if (model.kind == DisturbanceKind::local_spatial) {
    const Roi roi = model.roi.value_or(default_roi(side));
    double mean = epsilon_to_noise_mean(model.epsilon_db, context.signal_mean);
    if (model.local_power == LocalPower::field_mean) {
      mean *= static_cast<double>(side * side) / static_cast<double>(roi.area());
    }
    const double upper = 2.0 * mean;
    for (std::size_t y = roi.y0; y < roi.y0 + roi.h; ++y) {
      for (std::size_t x = roi.x0; x < roi.x0 + roi.w; ++x) {
        const std::size_t p = y * side + x;
        out[p] = upper * stream.uniform(StreamPurpose::spatial_disturbance, shot, p);
      }
    }
  }

  if (model.has_fluctuation()) {
    const double z = stream.normal(StreamPurpose::intensity_fluctuation, shot, 0);
    const double level =
        std::max(0.0, model.fluct_mean * context.i0 + model.gamma * context.i0 * z);
    for (double& v : out) v += level;
  }
}

DisturbanceField disturbance_field(const DisturbanceModel& model, std::size_t shot_index,
                                   std::uint64_t seed, const FieldContext& context) {
  model.validate(context.side);
  std::vector<double> values(context.side * context.side);
  fill_disturbance(model, shot_index, seed, context, values);
  return {ImageGrid::square(context.side, std::move(values)), shot_index};
}

}  // namespace spi
