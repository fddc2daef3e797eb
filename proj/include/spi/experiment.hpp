#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "spi/detection.hpp"
#include "spi/disturbance.hpp"
#include "spi/patterns.hpp"
#include "spi/scene.hpp"

namespace spi {

// What the sweep varies. `correction_case` runs the four fixed
// SPC-vs-corrected scenarios and ignores sweep_values.
enum class SweepParam { epsilon_db, gamma, correction_case };

std::string_view to_string(SweepParam param);
SweepParam parse_sweep_param(std::string_view text);

struct SweepConfig {
  std::string name = "run";  // prefix for every output file
  TargetSpec target;
  std::size_t side = 64;
  PatternKind pattern_kind = PatternKind::hadamard;
  std::size_t pattern_count = 0;  // random patterns only; 0 means side^2
  std::uint64_t pattern_seed = 0;
  std::vector<Method> methods = {Method::cgi, Method::spc};
  DisturbanceModel disturbance;  // the swept parameter is overwritten per point
  SweepParam sweep_param = SweepParam::epsilon_db;
  std::vector<double> sweep_values = {0.0};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  SourceConfig source;
  MonitorConfig monitor;

  // Execution only; not part of the digest.
  std::filesystem::path output_dir;  // empty: nothing is written
  bool write_images = true;
  unsigned threads = 1;

  void validate() const;
  // Key-sorted JSON of every result-affecting field.
  std::string canonical() const;
  std::string digest() const;
};

struct SweepPoint {
  std::string label;  // used in CSV rows and image names
  DisturbanceModel model;
};

// Disturbance scenarios the config expands to, in output order.
std::vector<SweepPoint> sweep_points(const SweepConfig& config);

struct ResultRow {
  std::size_t point_index = 0;
  std::string sweep_value;
  Method method = Method::cgi;
  std::uint64_t seed = 0;
  double psnr_db = 0.0;
  double mse = 0.0;
};

struct AggregateRow {
  std::size_t point_index = 0;
  std::string sweep_value;
  Method method = Method::cgi;
  double psnr_mean_db = 0.0;
  double psnr_std_db = 0.0;  // sample standard deviation over seeds
};

struct ExperimentResult {
  std::string sweep_param;
  std::vector<ResultRow> rows;  // sorted by (point, method, seed)
  std::vector<AggregateRow> aggregates;
  std::string config_digest;

  const AggregateRow& aggregate(std::string_view sweep_value, Method method) const;
  std::string rows_csv() const;
  std::string aggregates_csv() const;
};

ExperimentResult run_sweep(const SweepConfig& config);

// The four monitor-correction scenarios with methods {spc, spc_corrected}.
ExperimentResult correction_study(SweepConfig config);

inline constexpr std::string_view kPresetNames[] = {"fig2", "fig3", "fig4", "fig5"};
SweepConfig preset(std::string_view name);

// Shortest round-trip decimal form, used for sweep labels.
std::string format_value(double value);

}  // namespace spi
