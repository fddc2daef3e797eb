#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spi/disturbance.hpp"
#include "spi/patterns.hpp"
#include "spi/scene.hpp"

namespace spi {

enum class Method { cgi, spc, spc_corrected };

std::string_view to_string(Method method);
Method parse_method(std::string_view text);

struct SourceConfig {
  double intensity_i0 = 1.0;
  // Mean modulated-signal intensity used to reference epsilon. Defaults to
  // I0/2, the mean of binary patterns scaled by I0.
  std::optional<double> signal_mean;

  double resolved_signal_mean() const { return signal_mean.value_or(intensity_i0 / 2.0); }
  void validate() const;
};

// Beam-splitter tap in front of the SPC modulator.
struct MonitorConfig {
  bool enabled = true;
  double split_fraction = 0.1;

  void validate() const;
};

struct Provenance {
  std::uint64_t seed = 0;
  std::string model_digest;  // hex FNV-1a of DisturbanceModel::canonical()
};

struct MeasurementSeries {
  std::vector<double> bucket;
  std::optional<std::vector<double>> monitor;
  Method method = Method::cgi;
  Provenance provenance;

  std::size_t size() const { return bucket.size(); }
};

// B_i = sum_x (I0 P_i(x) + I_b^i(x)) T(x)
MeasurementSeries measure_cgi(const ImageGrid& target, const PatternSet& patterns,
                              const DisturbanceModel& model, const SourceConfig& source,
                              std::uint64_t seed, unsigned threads = 1);

// L_i(x) = I0 + I_b^i(x)
// B_i = (1 - beta) sum_x P_i(x) L_i(x) T(x),  M_i = beta sum_x L_i(x) T(x)
// With the monitor disabled beta is 0 and no monitor values are recorded.
MeasurementSeries measure_spc(const ImageGrid& target, const PatternSet& patterns,
                              const DisturbanceModel& model, const SourceConfig& source,
                              const MonitorConfig& monitor, std::uint64_t seed,
                              unsigned threads = 1);

// CSV with columns shot_index,bucket,monitor (monitor empty when absent).
std::string series_to_csv(const MeasurementSeries& series);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

}  // namespace spi
