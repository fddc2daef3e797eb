// spi: single-pixel imaging simulator.
//
//   spi run --config <file.toml> [--out DIR] [--threads N]
//   spi preset <fig2|fig3|fig4|fig5> [--out DIR] [--seeds a,b,c] [--threads N]
//   spi reconstruct [--target IMG] --method M --disturbance D [--epsilon-db X] [--gamma Y] [--seed S]
//   spi info
//
// Exit codes: 0 success, 1 usage error (bad flags or config), 2 runtime error.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spi/config.hpp"
#include "spi/experiment.hpp"
#include "spi/metrics.hpp"
#include "spi/parallel.hpp"

namespace {

constexpr const char* kVersion = "1.0.0";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::filesystem::path resolve_out(const std::string& flag, const std::filesystem::path& from_config) {
  if (!flag.empty()) return flag;
  if (!from_config.empty()) return from_config;
  if (const char* env = std::getenv("SPI_OUT_DIR"); env && *env) return env;
  return "spi_out";
}

void report(const spi::ExperimentResult& result, const spi::SweepConfig& config) {
  std::cout << result.aggregates_csv();
  std::cout << "wrote " << (config.output_dir / (config.name + "_results.csv")).string()
            << " (config digest " << result.config_digest << ")\n";
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    try {
      if (item.empty() || item.front() == '-') throw std::invalid_argument(item);
      seeds.push_back(std::stoull(item, &used));
    } catch (const std::exception&) {
      throw UsageError("--seeds: invalid seed '" + item + "'");
    }
    if (used != item.size()) throw UsageError("--seeds: invalid seed '" + item + "'");
  }
  if (seeds.empty()) throw UsageError("--seeds: empty list");
  return seeds;
}

void print_info() {
  std::cout << "spi " << kVersion << "\n\n"
            << "Defaults: side 64, Hadamard patterns K = 4096, I0 1.0, signal_mean I0/2,\n"
            << "monitor split 0.1, fluct_mean 1.0, seeds [1..5], threads 0\n"
            << "(available parallelism, " << spi::resolve_threads(0) << " on this machine)\n\n"
            << spi::config_reference() << "\n"
            << "Formats:\n"
            << "  results CSV    sweep_param,sweep_value,method,seed,psnr_db,mse\n"
            << "  aggregate CSV  sweep_param,sweep_value,method,psnr_mean_db,psnr_std_db\n"
            << "                 dB with 4 decimals, \"inf\" for a perfect match\n"
            << "  images         <name>_<method>_<value>_<seed>.pgm (PGM P5, 8-bit)\n"
            << "  raw float      \"SPI1\", u32le width, u32le height, u32le 0, then\n"
            << "                 width*height little-endian float64, row-major\n"
            << "  targets        PGM P2/P5 or PNG, 8-bit grayscale, no resampling\n"
            << "Environment: SPI_OUT_DIR sets the output directory when --out is absent.\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-pixel imaging simulator: CGI vs SPC under light disturbance"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string out_flag;
  unsigned threads = 0;
  bool threads_given = false;

  auto* run = app.add_subcommand("run", "Run a sweep described by a TOML config");
  std::string config_path;
  run->add_option("--config", config_path, "Config file")->required();
  run->add_option("--out", out_flag, "Output directory");
  run->add_option("--threads", threads, "Worker threads (0 = available parallelism)");

  auto* pre = app.add_subcommand("preset", "Run one of the built-in figure sweeps");
  std::string preset_name;
  std::string seeds_flag;
  bool no_images = false;
  pre->add_option("name", preset_name, "fig2 | fig3 | fig4 | fig5")->required();
  pre->add_option("--out", out_flag, "Output directory");
  pre->add_option("--seeds", seeds_flag, "Comma-separated seeds (default 1,2,3,4,5)");
  pre->add_option("--threads", threads, "Worker threads (0 = available parallelism)");
  pre->add_flag("--no-images", no_images, "Skip writing reconstructed images");

  auto* rec = app.add_subcommand("reconstruct", "Simulate and reconstruct a single point");
  std::string target = "builtin:letters";
  std::string method = "cgi";
  std::string disturbance = "none";
  double epsilon_db = 0.0;
  double gamma = 0.0;
  std::uint64_t seed = 1;
  std::size_t side = 64;
  rec->add_option("--target", target, "Image path or builtin:<letters|bars|checker|flat>");
  rec->add_option("--side", side, "Grid side in pixels");
  rec->add_option("--method", method, "cgi | spc | spc_corrected");
  rec->add_option("--disturbance", disturbance, "none | global | local | intensity | composite");
  rec->add_option("--epsilon-db", epsilon_db, "Irradiation SNR in dB");
  rec->add_option("--gamma", gamma, "Intensity disturbance degree");
  rec->add_option("--seed", seed, "RNG seed");
  rec->add_option("--out", out_flag, "Output directory");
  rec->add_option("--threads", threads, "Worker threads (0 = available parallelism)");

  auto* info = app.add_subcommand("info", "Print defaults, version and file formats");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code == 0) return 0;
    std::cerr << app.help();
    return 1;
  }
  threads_given = run->count("--threads") + pre->count("--threads") + rec->count("--threads") > 0;

  spi::SweepConfig config;
  bool is_correction_study = false;
  try {
    if (*info) {
      print_info();
      return 0;
    }
    if (*run) {
      const spi::ResolvedConfig resolved = spi::parse_config(config_path);
      config = resolved.sweep;
    } else if (*pre) {
      config = spi::preset(preset_name);
      if (!seeds_flag.empty()) config.seeds = parse_seed_list(seeds_flag);
      config.write_images = !no_images;
      is_correction_study = preset_name == "fig5";
    } else {
      config.name = "reconstruct";
      config.side = side;
      config.target = {target, side};
      config.methods = {spi::parse_method(method)};
      config.disturbance.kind = spi::parse_disturbance_kind(disturbance);
      config.disturbance.gamma = gamma;
      config.seeds = {seed};
      if (config.disturbance.kind == spi::DisturbanceKind::intensity_fluctuation) {
        config.sweep_param = spi::SweepParam::gamma;
        config.sweep_values = {gamma};
      } else {
        config.sweep_param = spi::SweepParam::epsilon_db;
        config.sweep_values = {epsilon_db};
      }
    }
    if (threads_given || !*run) config.threads = threads;
    config.output_dir = resolve_out(out_flag, config.output_dir);
    config.validate();
  } catch (const std::exception& e) {
    std::cerr << "spi: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    const auto result =
        is_correction_study ? spi::correction_study(config) : spi::run_sweep(config);
    report(result, config);
  } catch (const std::exception& e) {
    std::cerr << "spi: error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
