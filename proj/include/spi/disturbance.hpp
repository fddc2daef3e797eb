#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "spi/scene.hpp"

namespace spi {

enum class DisturbanceKind { none, global_spatial, local_spatial, intensity_fluctuation, composite };

std::string_view to_string(DisturbanceKind kind);
DisturbanceKind parse_disturbance_kind(std::string_view text);

struct Roi {
  std::size_t x0 = 0;
  std::size_t y0 = 0;
  std::size_t w = 0;
  std::size_t h = 0;

  std::size_t area() const { return w * h; }
  bool contains(std::size_t x, std::size_t y) const {
    return x >= x0 && x < x0 + w && y >= y0 && y < y0 + h;
  }
  bool operator==(const Roi&) const = default;
};

// Centered square covering about 4 % of the grid (13 x 13 on 64 x 64).
Roi default_roi(std::size_t side);

// How the irradiation SNR is referenced for a local disturbance.
//  field_mean: epsilon compares the signal mean with the disturbance
//              averaged over the whole object plane, so the ROI pixels are
//              brighter by grid_area / roi_area.
//  per_pixel:  epsilon compares the signal mean with the disturbance mean
//              inside the ROI.
enum class LocalPower { field_mean, per_pixel };

std::string_view to_string(LocalPower mode);
LocalPower parse_local_power(std::string_view text);

struct DisturbanceModel {
  DisturbanceKind kind = DisturbanceKind::none;
  double epsilon_db = 0.0;
  double gamma = 0.0;
  std::optional<Roi> roi;  // local kind; defaults to default_roi(side)
  double fluct_mean = 1.0;
  LocalPower local_power = LocalPower::field_mean;

  bool has_spatial() const {
    return kind == DisturbanceKind::global_spatial || kind == DisturbanceKind::local_spatial ||
           kind == DisturbanceKind::composite;
  }
  bool has_fluctuation() const {
    return kind == DisturbanceKind::intensity_fluctuation || kind == DisturbanceKind::composite;
  }

  // Throws std::invalid_argument if the model cannot be used on a side x side grid.
  void validate(std::size_t side) const;

  // Stable textual form used for provenance digests.
  std::string canonical() const;
};

struct FieldContext {
  std::size_t side = 64;
  double signal_mean = 0.5;  // mean modulated-signal intensity
  double i0 = 1.0;           // source intensity at the object plane
};

// <I_b> = signal_mean / 10^(epsilon_db / 10).
double epsilon_to_noise_mean(double epsilon_db, double signal_mean);

struct DisturbanceField {
  ImageGrid grid;
  std::size_t shot_index = 0;
};

DisturbanceField disturbance_field(const DisturbanceModel& model, std::size_t shot_index,
                                   std::uint64_t seed, const FieldContext& context);

// Allocation-free form used by the forward models. `out` has side^2 entries.
// Draws are keyed by (seed, shot_index, pixel), never by call order.
void fill_disturbance(const DisturbanceModel& model, std::size_t shot_index, std::uint64_t seed,
                      const FieldContext& context, std::span<double> out);

}  // namespace spi
