#include "spi/experiment.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "spi/metrics.hpp"
#include "spi/parallel.hpp"
#include "spi/reconstruction.hpp"

namespace spi {

std::string_view to_string(SweepParam param) {
  switch (param) {
    case SweepParam::epsilon_db: return "epsilon_db";
    case SweepParam::gamma: return "gamma";
    case SweepParam::correction_case: return "case";
  }
  return "?";
}

SweepParam parse_sweep_param(std::string_view text) {
  if (text == "epsilon_db") return SweepParam::epsilon_db;
  if (text == "gamma") return SweepParam::gamma;
  if (text == "case") return SweepParam::correction_case;
  throw std::invalid_argument("unknown sweep param '" + std::string(text) +
                              "' (expected epsilon_db, gamma or case)");
}

std::string format_value(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void SweepConfig::validate() const {
  if (side < 2) throw std::invalid_argument("side must be >= 2");
  if (target.size != side) throw std::invalid_argument("target.size must equal side");
  if (pattern_kind == PatternKind::hadamard && !std::has_single_bit(side)) {
    throw std::invalid_argument("hadamard patterns need a power-of-two side");
  }
  if (methods.empty()) throw std::invalid_argument("methods must not be empty");
  if (std::set<Method>(methods.begin(), methods.end()).size() != methods.size()) {
    throw std::invalid_argument("methods must not repeat");
  }
  if (seeds.empty()) throw std::invalid_argument("seeds must not be empty");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw std::invalid_argument("seeds must not repeat");
  }
  if (sweep_param != SweepParam::correction_case) {
    if (sweep_values.empty()) throw std::invalid_argument("sweep.values must not be empty");
    for (std::size_t i = 1; i < sweep_values.size(); ++i) {
      if (!(sweep_values[i] > sweep_values[i - 1])) {
        throw std::invalid_argument("sweep.values must be strictly increasing");
      }
    }
    if (sweep_param == SweepParam::gamma) {
      for (double g : sweep_values)
        if (!(g >= 0.0)) throw std::invalid_argument("gamma sweep values must be >= 0");
    }
  }
  const bool needs_monitor =
      std::find(methods.begin(), methods.end(), Method::spc_corrected) != methods.end();
  if (needs_monitor && !monitor.enabled) {
    throw std::invalid_argument("method spc_corrected requires monitor.enabled = true");
  }
  if (pattern_kind == PatternKind::random && pattern_count > std::numeric_limits<std::uint32_t>::max()) {
    throw std::invalid_argument("pattern_count too large");
  }
  source.validate();
  if (monitor.enabled) monitor.validate();
  for (const auto& point : sweep_points(*this)) point.model.validate(side);
}

std::string SweepConfig::canonical() const {
  using nlohmann::json;
  json j;
  j["name"] = name;
  j["target"] = {{"source", target.source}, {"size", target.size}};
  j["side"] = side;
  j["patterns"] = pattern_kind == PatternKind::hadamard ? "hadamard" : "random";
  j["pattern_count"] = pattern_count;
  j["pattern_seed"] = pattern_seed;
  json m = json::array();
  for (Method method : methods) m.push_back(std::string(to_string(method)));
  j["methods"] = m;
  json d;
  d["kind"] = std::string(to_string(disturbance.kind));
  d["epsilon_db"] = disturbance.epsilon_db;
  d["gamma"] = disturbance.gamma;
  d["fluct_mean"] = disturbance.fluct_mean;
  d["local_power"] = std::string(to_string(disturbance.local_power));
  const Roi roi = disturbance.roi.value_or(default_roi(side));
  d["roi"] = {roi.x0, roi.y0, roi.w, roi.h};
  j["disturbance"] = d;
  j["sweep"] = {{"param", std::string(to_string(sweep_param))}, {"values", sweep_values}};
  j["seeds"] = seeds;
  j["source"] = {{"i0", source.intensity_i0}, {"signal_mean", source.resolved_signal_mean()}};
  j["monitor"] = {{"enabled", monitor.enabled}, {"split_fraction", monitor.split_fraction}};
  return j.dump();
}

std::string SweepConfig::digest() const { return hex64(fnv1a64(canonical())); }

std::vector<SweepPoint> sweep_points(const SweepConfig& config) {
  std::vector<SweepPoint> points;
  if (config.sweep_param == SweepParam::correction_case) {
    DisturbanceModel base = config.disturbance;
    auto with = [&](DisturbanceKind kind, double eps, double gamma) {
      DisturbanceModel m = base;
      m.kind = kind;
      m.epsilon_db = eps;
      m.gamma = gamma;
      return m;
    };
    points.push_back({"a", with(DisturbanceKind::global_spatial, -20.0, 0.0)});
    points.push_back({"b", with(DisturbanceKind::local_spatial, -5.0, 0.0)});
    points.push_back({"c", with(DisturbanceKind::intensity_fluctuation, 0.0, 0.12)});
    points.push_back({"d", with(DisturbanceKind::composite, -10.0, 0.2)});
    return points;
  }
  for (double v : config.sweep_values) {
    DisturbanceModel m = config.disturbance;
    if (config.sweep_param == SweepParam::epsilon_db) {
      m.epsilon_db = v;
    } else {
      m.gamma = v;
    }
    points.push_back({format_value(v), m});
  }
  return points;
}

namespace {

PatternSet build_patterns(const SweepConfig& config) {
  if (config.pattern_kind == PatternKind::hadamard) return hadamard_pattern_set(config.side);
  const std::size_t count =
      config.pattern_count == 0 ? config.side * config.side : config.pattern_count;
  return random_pattern_set(config.side, count, config.pattern_seed);
}

bool contains(const std::vector<Method>& methods, Method m) {
  return std::find(methods.begin(), methods.end(), m) != methods.end();
}

std::vector<AggregateRow> aggregate_rows(const std::vector<ResultRow>& rows) {
  std::vector<AggregateRow> out;
  std::size_t i = 0;
  while (i < rows.size()) {
    std::size_t j = i;
    while (j < rows.size() && rows[j].point_index == rows[i].point_index &&
           rows[j].method == rows[i].method) {
      ++j;
    }
    const auto n = static_cast<double>(j - i);
    double sum = 0.0;
    bool any_inf = false;
    bool all_inf = true;
    for (std::size_t k = i; k < j; ++k) {
      sum += rows[k].psnr_db;
      any_inf = any_inf || std::isinf(rows[k].psnr_db);
      all_inf = all_inf && std::isinf(rows[k].psnr_db);
    }
    AggregateRow agg{rows[i].point_index, rows[i].sweep_value, rows[i].method, sum / n, 0.0};
    if (all_inf) {
      agg.psnr_std_db = 0.0;
    } else if (any_inf) {
      agg.psnr_std_db = std::numeric_limits<double>::quiet_NaN();
    } else if (j - i > 1) {
      double ss = 0.0;
      for (std::size_t k = i; k < j; ++k) {
        const double d = rows[k].psnr_db - agg.psnr_mean_db;
        ss += d * d;
      }
      agg.psnr_std_db = std::sqrt(ss / (n - 1.0));
    }
    out.push_back(agg);
    i = j;
  }
  return out;
}

std::string format_mse(double mse) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", mse);
  return buf;
}

}  // namespace

const AggregateRow& ExperimentResult::aggregate(std::string_view sweep_value, Method method) const {
  for (const auto& a : aggregates) {
    if (a.sweep_value == sweep_value && a.method == method) return a;
  }
  throw std::out_of_range("no aggregate for " + std::string(sweep_value) + "/" +
                          std::string(to_string(method)));
}

std::string ExperimentResult::rows_csv() const {
  std::string out = "sweep_param,sweep_value,method,seed,psnr_db,mse\n";
  for (const auto& r : rows) {
    out += sweep_param + ',' + r.sweep_value + ',' + std::string(to_string(r.method)) + ',' +
           std::to_string(r.seed) + ',' + format_db(r.psnr_db) + ',' + format_mse(r.mse) + '\n';
  }
  return out;
}

std::string ExperimentResult::aggregates_csv() const {
  std::string out = "sweep_param,sweep_value,method,psnr_mean_db,psnr_std_db\n";
  for (const auto& a : aggregates) {
    out += sweep_param + ',' + a.sweep_value + ',' + std::string(to_string(a.method)) + ',' +
           format_db(a.psnr_mean_db) + ',' + format_db(a.psnr_std_db) + '\n';
  }
  return out;
}

ExperimentResult run_sweep(const SweepConfig& config) {
  config.validate();
  const ImageGrid target = resolve_target(config.target);
  const PatternSet patterns = build_patterns(config);
  const auto points = sweep_points(config);

  std::vector<std::uint64_t> seeds = config.seeds;
  std::sort(seeds.begin(), seeds.end());
  std::vector<Method> methods = config.methods;
  std::sort(methods.begin(), methods.end());

  std::vector<double> reference_values(target.size());
  std::transform(target.values().begin(), target.values().end(), reference_values.begin(),
                 [](double t) { return 255.0 * t; });
  const ImageGrid reference(target.width(), target.height(), std::move(reference_values));

  const bool want_cgi = contains(methods, Method::cgi);
  const bool want_spc = contains(methods, Method::spc) || contains(methods, Method::spc_corrected);

  if (!config.output_dir.empty()) std::filesystem::create_directories(config.output_dir);

  const std::size_t jobs = points.size() * seeds.size();
  const unsigned threads = resolve_threads(config.threads);
  const unsigned inner = std::max<unsigned>(1, threads / static_cast<unsigned>(std::max<std::size_t>(1, jobs)));
  std::vector<std::vector<ResultRow>> job_rows(jobs);

  parallel_for(jobs, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t job = begin; job < end; ++job) {
      const std::size_t pi = job / seeds.size();
      const std::uint64_t seed = seeds[job % seeds.size()];
      const SweepPoint& point = points[pi];

      std::optional<MeasurementSeries> cgi;
      std::optional<MeasurementSeries> spc;
      if (want_cgi) cgi = measure_cgi(target, patterns, point.model, config.source, seed, inner);
      if (want_spc) {
        spc = measure_spc(target, patterns, point.model, config.source, config.monitor, seed,
                          inner);
      }

      for (Method method : methods) {
        const MeasurementSeries series = method == Method::cgi   ? *cgi
                                         : method == Method::spc ? *spc
                                                                 : correct_series(*spc);
        const Reconstruction rec = reconstruct(patterns, series, inner);
        const ImageGrid gray = normalize_to_gray(rec);
        const QualityScore q = score(gray, reference, 8, rec.excluded_pixels);
        job_rows[job].push_back({pi, point.label, method, seed, q.psnr_db, q.mse});

        if (!config.output_dir.empty() && config.write_images) {
          const std::string file = config.name + "_" + std::string(to_string(method)) + "_" +
                                   point.label + "_" + std::to_string(seed) + ".pgm";
          save_image(gray, config.output_dir / file, SaveMode::gray8, 1.0);
        }
      }
    }
  });

  ExperimentResult result;
  result.sweep_param = std::string(to_string(config.sweep_param));
  result.config_digest = config.digest();
  for (auto& rows : job_rows)
    for (auto& r : rows) result.rows.push_back(std::move(r));
  std::stable_sort(result.rows.begin(), result.rows.end(), [](const ResultRow& a, const ResultRow& b) {
    if (a.point_index != b.point_index) return a.point_index < b.point_index;
    if (a.method != b.method) return a.method < b.method;
    return a.seed < b.seed;
  });
  result.aggregates = aggregate_rows(result.rows);

  if (!config.output_dir.empty()) {
    write_file_atomic(config.output_dir / (config.name + "_results.csv"), result.rows_csv());
    write_file_atomic(config.output_dir / (config.name + "_aggregate.csv"), result.aggregates_csv());
    nlohmann::json manifest = nlohmann::json::parse(config.canonical());
    manifest["config_digest"] = result.config_digest;
    write_file_atomic(config.output_dir / (config.name + "_manifest.json"), manifest.dump(2) + "\n");
  }
  return result;
}

ExperimentResult correction_study(SweepConfig config) {
  if (!config.monitor.enabled) {
    throw std::invalid_argument("correction study requires monitor.enabled = true");
  }
  config.sweep_param = SweepParam::correction_case;
  config.methods = {Method::spc, Method::spc_corrected};
  return run_sweep(config);
}

SweepConfig preset(std::string_view name) {
  SweepConfig c;
  c.name = std::string(name);
  c.target = {"builtin:letters", 64};
  c.side = 64;
  c.seeds = {1, 2, 3, 4, 5};
  if (name == "fig2") {
    c.disturbance.kind = DisturbanceKind::global_spatial;
    c.sweep_param = SweepParam::epsilon_db;
    c.sweep_values = {-20, -10, -5, 0, 5, 10};
    c.methods = {Method::cgi, Method::spc};
  } else if (name == "fig3") {
    c.disturbance.kind = DisturbanceKind::local_spatial;
    c.sweep_param = SweepParam::epsilon_db;
    c.sweep_values = {-15, -10, -5, 0, 5, 10};
    c.methods = {Method::cgi, Method::spc};
  } else if (name == "fig4") {
    c.disturbance.kind = DisturbanceKind::intensity_fluctuation;
    c.sweep_param = SweepParam::gamma;
    c.sweep_values = {0.01, 0.02, 0.04, 0.08, 0.12, 0.2};
    c.methods = {Method::cgi, Method::spc};
  } else if (name == "fig5") {
    c.sweep_param = SweepParam::correction_case;
    c.sweep_values = {};
    c.methods = {Method::spc, Method::spc_corrected};
  } else {
    throw std::invalid_argument("unknown preset '" + std::string(name) +
                                "' (expected fig2, fig3, fig4 or fig5)");
  }
  return c;
}

}  // namespace spi
