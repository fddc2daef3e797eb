#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "spi/experiment.hpp"
#include "test_support.hpp"

using namespace spi;
namespace fs = std::filesystem;

namespace {

SweepConfig small(std::size_t side = 16) {
  SweepConfig c;
  c.name = "t";
  c.side = side;
  c.target.size = side;
  c.seeds = {1, 2};
  return c;
}

std::size_t count_files(const fs::path& dir, std::string_view ext) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir)) n += e.path().extension() == ext;
  return n;
}

}  // namespace

TEST_CASE("one method, one value, one seed gives one row") {
  auto c = small();
  c.methods = {Method::cgi};
  c.seeds = {1};
  const auto r = run_sweep(c);
  CHECK(r.rows.size() == 1);
  CHECK(r.aggregates.size() == 1);
  CHECK(r.sweep_param == "epsilon_db");
}

TEST_CASE("row count is the product of values, methods and seeds") {
  auto c = small(8);
  c.disturbance.kind = DisturbanceKind::global_spatial;
  c.sweep_values = {-10, 0, 10};
  c.methods = {Method::cgi, Method::spc, Method::spc_corrected};
  c.seeds = {3, 1, 2};
  const auto r = run_sweep(c);
  CHECK(r.rows.size() == 27);
  CHECK(r.aggregates.size() == 9);
  // Sorted by point, method, seed.
  CHECK(r.rows[0].sweep_value == "-10");
  CHECK(r.rows[0].seed == 1);
  CHECK(r.rows[2].seed == 3);
  CHECK(r.rows[3].method == Method::spc);
  CHECK(r.rows[26].sweep_value == "10");
}

TEST_CASE("undisturbed full Hadamard recovery is exact for CGI and SPC") {
  auto c = small(64);
  c.seeds = {1};
  c.monitor.enabled = false;
  const auto r = run_sweep(c);
  REQUIRE(r.rows.size() == 2);
  for (const auto& row : r.rows) {
    CHECK(std::isinf(row.psnr_db));
    CHECK(row.mse == 0.0);
  }
  // With the monitor arm the bucket is scaled by 1 - beta, leaving only rounding error.
  c.monitor.enabled = true;
  const auto with_monitor = run_sweep(c);
  CHECK(std::isinf(with_monitor.rows[0].psnr_db));
  CHECK(with_monitor.rows[1].psnr_db >= 200.0);
}

TEST_CASE("preset grids") {
  CHECK(preset("fig2").sweep_values == std::vector<double>{-20, -10, -5, 0, 5, 10});
  CHECK(preset("fig3").sweep_values == std::vector<double>{-15, -10, -5, 0, 5, 10});
  CHECK(preset("fig4").sweep_values == std::vector<double>{0.01, 0.02, 0.04, 0.08, 0.12, 0.2});
  CHECK(preset("fig2").disturbance.kind == DisturbanceKind::global_spatial);
  CHECK(preset("fig3").disturbance.kind == DisturbanceKind::local_spatial);
  CHECK(preset("fig4").disturbance.kind == DisturbanceKind::intensity_fluctuation);
  CHECK(preset("fig4").sweep_param == SweepParam::gamma);
  for (auto name : kPresetNames) {
    const auto p = preset(name);
    CHECK_NOTHROW(p.validate());
    CHECK(p.side == 64);
    CHECK(p.seeds.size() == 5);
  }
  CHECK(sweep_points(preset("fig2")).size() == 6);
  CHECK_THROWS_AS(preset("fig9"), std::invalid_argument);
}

TEST_CASE("the correction study has four cases") {
  const auto points = sweep_points(preset("fig5"));
  REQUIRE(points.size() == 4);
  CHECK(points[0].label == "a");
  CHECK(points[0].model.kind == DisturbanceKind::global_spatial);
  CHECK(points[0].model.epsilon_db == -20);
  CHECK(points[1].model.kind == DisturbanceKind::local_spatial);
  CHECK(points[2].model.kind == DisturbanceKind::intensity_fluctuation);
  CHECK(points[2].model.gamma == doctest::Approx(0.12));
  CHECK(points[3].model.kind == DisturbanceKind::composite);
}

TEST_CASE("correction helps under pure intensity fluctuation") {
  auto c = small(16);
  c.seeds = {1, 2, 3};
  const auto r = correction_study(c);
  CHECK(r.sweep_param == "case");
  CHECK(r.rows.size() == 4 * 2 * 3);
  CHECK(r.aggregate("c", Method::spc_corrected).psnr_mean_db > r.aggregate("c", Method::spc).psnr_mean_db);
}

TEST_CASE("corrected equals uncorrected when gamma is zero") {
  auto c = small(16);
  c.disturbance.kind = DisturbanceKind::intensity_fluctuation;
  c.sweep_param = SweepParam::gamma;
  c.sweep_values = {0.0};
  c.methods = {Method::spc, Method::spc_corrected};
  const auto r = run_sweep(c);
  for (std::uint64_t s : c.seeds) {
    CHECK(r.rows[s - 1].psnr_db == r.rows[2 + s - 1].psnr_db);
  }
}

TEST_CASE("invalid configs are rejected") {
  auto c = small();
  c.methods = {Method::spc_corrected};
  c.monitor.enabled = false;
  CHECK_THROWS_AS(run_sweep(c), std::invalid_argument);
  CHECK_THROWS_AS(correction_study(c), std::invalid_argument);

  c = small();
  c.sweep_values = {0, 0};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.sweep_values = {1, 0};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.sweep_values = {};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = small();
  c.seeds = {};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = small();
  c.methods = {};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("reruns write byte-identical outputs and thread count does not matter") {
  spi::testing::TempDir a, b;
  auto c = small(16);
  c.disturbance.kind = DisturbanceKind::composite;
  c.disturbance.gamma = 0.1;
  c.sweep_values = {-5, 5};
  c.methods = {Method::cgi, Method::spc, Method::spc_corrected};
  c.output_dir = a.path();
  c.threads = 1;
  const auto r1 = run_sweep(c);
  c.output_dir = b.path();
  c.threads = 7;
  const auto r2 = run_sweep(c);
  for (const char* f : {"t_results.csv", "t_aggregate.csv", "t_manifest.json"}) {
    CHECK(spi::testing::read_bytes(a / f) == spi::testing::read_bytes(b / f));
  }
  CHECK(r1.rows_csv() == r2.rows_csv());
  CHECK(count_files(a.path(), ".pgm") == 2 * 3 * 2);
  CHECK(count_files(a.path(), ".tmp") == 0);
  CHECK(fs::exists(a / "t_cgi_-5_1.pgm"));
  CHECK(spi::testing::read_bytes(a / "t_spc_5_2.pgm") == spi::testing::read_bytes(b / "t_spc_5_2.pgm"));
}

TEST_CASE("write_images false writes only tables") {
  spi::testing::TempDir dir;
  auto c = small(8);
  c.output_dir = dir.path();
  c.write_images = false;
  run_sweep(c);
  CHECK(count_files(dir.path(), ".pgm") == 0);
  CHECK(count_files(dir.path(), ".csv") == 2);
}

TEST_CASE("config digest ignores execution-only fields") {
  auto c = small();
  const auto d = c.digest();
  c.threads = 9;
  c.output_dir = "/elsewhere";
  c.write_images = false;
  CHECK(c.digest() == d);
  c.seeds = {1, 2, 3};
  CHECK(c.digest() != d);
  CHECK(d.size() == 16);
}

TEST_CASE("aggregates are mean and sample std over seeds") {
  auto c = small(8);
  c.disturbance.kind = DisturbanceKind::global_spatial;
  c.seeds = {1, 2, 3};
  c.methods = {Method::cgi};
  const auto r = run_sweep(c);
  double mean = 0;
  for (const auto& row : r.rows) mean += row.psnr_db / 3.0;
  double var = 0;
  for (const auto& row : r.rows) var += (row.psnr_db - mean) * (row.psnr_db - mean) / 2.0;
  const auto& agg = r.aggregate("0", Method::cgi);
  CHECK(agg.psnr_mean_db == doctest::Approx(mean).epsilon(1e-12));
  CHECK(agg.psnr_std_db == doctest::Approx(std::sqrt(var)).epsilon(1e-12));
  CHECK_THROWS(r.aggregate("1", Method::cgi));
}

TEST_CASE("csv layout") {
  auto c = small(8);
  c.methods = {Method::cgi};
  c.seeds = {4};
  const auto r = run_sweep(c);
  CHECK(r.rows_csv() == "sweep_param,sweep_value,method,seed,psnr_db,mse\nepsilon_db,0,cgi,4,inf,0\n");
  CHECK(r.aggregates_csv() ==
        "sweep_param,sweep_value,method,psnr_mean_db,psnr_std_db\nepsilon_db,0,cgi,inf,0.0000\n");
}

TEST_CASE("format_value is the shortest round-trip form") {
  CHECK(format_value(-20.0) == "-20");
  CHECK(format_value(0.12) == "0.12");
  CHECK(format_value(0.1 + 0.2) == "0.30000000000000004");
}
