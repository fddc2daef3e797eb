#include "spi/detection.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "spi/parallel.hpp"

namespace spi {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::cgi: return "cgi";
    case Method::spc: return "spc";
    case Method::spc_corrected: return "spc_corrected";
  }
  return "?";
}

Method parse_method(std::string_view text) {
  if (text == "cgi") return Method::cgi;
  if (text == "spc") return Method::spc;
  if (text == "spc_corrected") return Method::spc_corrected;
  throw std::invalid_argument("unknown method '" + std::string(text) +
                              "' (expected cgi, spc or spc_corrected)");
}

void SourceConfig::validate() const {
  if (!(intensity_i0 > 0.0) || !std::isfinite(intensity_i0)) {
    throw std::invalid_argument("source.i0 must be > 0");
  }
  if (signal_mean && (!(*signal_mean > 0.0) || !std::isfinite(*signal_mean))) {
    throw std::invalid_argument("source.signal_mean must be > 0");
  }
}

void MonitorConfig::validate() const {
  if (!(split_fraction > 0.0 && split_fraction < 1.0)) {
    throw std::invalid_argument("monitor.split_fraction must lie in (0, 1)");
  }
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

namespace {

void check_shapes(const ImageGrid& target, const PatternSet& patterns) {
  if (!target.is_square() || target.width() != patterns.side()) {
    throw std::invalid_argument("dimension mismatch: target is " + std::to_string(target.width()) +
                                "x" + std::to_string(target.height()) + ", patterns are " +
                                std::to_string(patterns.side()) + "x" +
                                std::to_string(patterns.side()));
  }
}

FieldContext field_context(const PatternSet& patterns, const SourceConfig& source) {
  return {patterns.side(), source.resolved_signal_mean(), source.intensity_i0};
}

Provenance provenance(const DisturbanceModel& model, std::uint64_t seed) {
  return {seed, hex64(fnv1a64(model.canonical()))};
}

}  // namespace

MeasurementSeries measure_cgi(const ImageGrid& target, const PatternSet& patterns,
                              const DisturbanceModel& model, const SourceConfig& source,
                              std::uint64_t seed, unsigned threads) {
  check_shapes(target, patterns);
  source.validate();
  model.validate(patterns.side());

  const FieldContext context = field_context(patterns, source);
  const double i0 = source.intensity_i0;
  const auto t = target.values();
  MeasurementSeries series;
  series.method = Method::cgi;
  series.provenance = provenance(model, seed);
  series.bucket.resize(patterns.count());

  parallel_for(patterns.count(), threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> field(patterns.pixels());
    for (std::size_t i = begin; i < end; ++i) {
      fill_disturbance(model, i, seed, context, field);
      const auto p = patterns.pattern(i);
      double sum = 0.0;
      for (std::size_t x = 0; x < field.size(); ++x) {
        sum += (i0 * p[x] + field[x]) * t[x];
      }
      series.bucket[i] = sum;
    }
  });
  return series;
}

MeasurementSeries measure_spc(const ImageGrid& target, const PatternSet& patterns,
                              const DisturbanceModel& model, const SourceConfig& source,
                              const MonitorConfig& monitor, std::uint64_t seed,
                              unsigned threads) {
  check_shapes(target, patterns);
  source.validate();
  model.validate(patterns.side());
  if (monitor.enabled) monitor.validate();

  const FieldContext context = field_context(patterns, source);
  const double i0 = source.intensity_i0;
  const double beta = monitor.enabled ? monitor.split_fraction : 0.0;
  const auto t = target.values();
  MeasurementSeries series;
  series.method = Method::spc;
  series.provenance = provenance(model, seed);
  series.bucket.resize(patterns.count());
  if (monitor.enabled) series.monitor.emplace(patterns.count());

  parallel_for(patterns.count(), threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> field(patterns.pixels());
    for (std::size_t i = begin; i < end; ++i) {
      fill_disturbance(model, i, seed, context, field);
      const auto p = patterns.pattern(i);
      double modulated = 0.0;
      double total = 0.0;
      for (std::size_t x = 0; x < field.size(); ++x) {
        const double reflected = (i0 + field[x]) * t[x];
        modulated += p[x] * reflected;
        total += reflected;
      }
      series.bucket[i] = (1.0 - beta) * modulated;
      if (series.monitor) (*series.monitor)[i] = beta * total;
    }
  });
  return series;
}

std::string series_to_csv(const MeasurementSeries& series) {
  std::string out = "shot_index,bucket,monitor\n";
  char buf[96];
  for (std::size_t i = 0; i < series.bucket.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,", i, series.bucket[i]);
    out += buf;
    if (series.monitor) {
      std::snprintf(buf, sizeof buf, "%.17g", (*series.monitor)[i]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace spi
