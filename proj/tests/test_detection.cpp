#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "spi/detection.hpp"

using namespace spi;

namespace {

DisturbanceModel model_of(DisturbanceKind kind, double eps = 0.0, double gamma = 0.0) {
  DisturbanceModel m;
  m.kind = kind;
  m.epsilon_db = eps;
  m.gamma = gamma;
  return m;
}

ImageGrid random_target(std::size_t side, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(side * side);
  for (auto& x : v) x = u(rng);
  return ImageGrid::square(side, v);
}

const MonitorConfig kNoMonitor{false, 0.1};

}  // namespace

TEST_CASE("zero target gives zero buckets and monitor values") {
  const auto patterns = hadamard_pattern_set(8);
  const ImageGrid zero(8, 8, 0.0);
  const auto model = model_of(DisturbanceKind::composite, -20.0, 0.2);
  const auto cgi = measure_cgi(zero, patterns, model, {}, 1);
  const auto spc = measure_spc(zero, patterns, model, {}, {}, 1);
  for (double b : cgi.bucket) CHECK(b == 0.0);
  for (double b : spc.bucket) CHECK(b == 0.0);
  REQUIRE(spc.monitor);
  for (double m : *spc.monitor) CHECK(m == 0.0);
  CHECK_FALSE(cgi.monitor);
}

TEST_CASE("hand-computed CGI buckets") {
  const auto patterns = hadamard_pattern_set(2);
  const auto none = model_of(DisturbanceKind::none);
  const auto checker = measure_cgi(builtin_target("checker", 2), patterns, none, {}, 1);
  CHECK(checker.bucket[0] == 2.0);

  const auto single = measure_cgi(ImageGrid::square(2, {0, 1, 0, 0}), patterns, none, {}, 1);
  CHECK(single.bucket == std::vector<double>{1, 0, 1, 0});
  CHECK(single.method == Method::cgi);
}

TEST_CASE("without disturbance SPC matches CGI up to the tap loss") {
  const auto patterns = hadamard_pattern_set(8);
  const auto target = random_target(8, 3);
  const SourceConfig source{2.5, std::nullopt};
  const auto none = model_of(DisturbanceKind::none);
  // Both models scale the patterns by the same I0.
  const auto unit_cgi = measure_cgi(target, patterns, none, {}, 4);
  const auto cgi = measure_cgi(target, patterns, none, source, 4);
  const auto spc = measure_spc(target, patterns, none, source, kNoMonitor, 4);
  CHECK_FALSE(spc.monitor);
  for (std::size_t i = 0; i < cgi.size(); ++i) {
    CHECK(cgi.bucket[i] == doctest::Approx(2.5 * unit_cgi.bucket[i]).epsilon(1e-13));
    CHECK(spc.bucket[i] == doctest::Approx(cgi.bucket[i]).epsilon(1e-13));
  }
  // At I0 = 1 the two are bit-identical.
  CHECK(measure_spc(target, patterns, none, {}, kNoMonitor, 4).bucket == unit_cgi.bucket);

  const auto tapped = measure_spc(target, patterns, none, {}, {true, 0.25}, 4);
  const auto unit = measure_cgi(target, patterns, none, {}, 4);
  for (std::size_t i = 0; i < unit.size(); ++i) {
    CHECK(tapped.bucket[i] == doctest::Approx(0.75 * unit.bucket[i]).epsilon(1e-13));
  }
}

TEST_CASE("monitor cancels a spatially constant fluctuation") {
  const auto patterns = hadamard_pattern_set(4);
  const auto target = random_target(4, 8);
  const MonitorConfig monitor{true, 0.1};
  const auto series =
      measure_spc(target, patterns, model_of(DisturbanceKind::intensity_fluctuation, 0.0, 0.3), {},
                  monitor, 21);
  double total = 0.0;
  for (double t : target.values()) total += t;
  for (std::size_t i = 0; i < 16; ++i) {
    double pt = 0.0;
    for (std::size_t x = 0; x < 16; ++x) pt += patterns.pattern(i)[x] * target[x];
    const double expected = 0.9 * pt / (0.1 * total);
    CHECK(series.bucket[i] / (*series.monitor)[i] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("forward models are linear in the target") {
  const auto patterns = random_pattern_set(8, 40, 2);
  const auto t1 = random_target(8, 1);
  const auto t2 = random_target(8, 2);
  std::vector<double> mix(64);
  for (std::size_t i = 0; i < 64; ++i) mix[i] = 1.7 * t1[i] + t2[i];
  const auto tm = ImageGrid::square(8, mix);
  const auto model = model_of(DisturbanceKind::composite, -6.0, 0.1);

  const auto c1 = measure_cgi(t1, patterns, model, {}, 5);
  const auto c2 = measure_cgi(t2, patterns, model, {}, 5);
  const auto cm = measure_cgi(tm, patterns, model, {}, 5);
  const auto s1 = measure_spc(t1, patterns, model, {}, {}, 5);
  const auto s2 = measure_spc(t2, patterns, model, {}, {}, 5);
  const auto sm = measure_spc(tm, patterns, model, {}, {}, 5);
  for (std::size_t i = 0; i < 40; ++i) {
    CHECK(cm.bucket[i] == doctest::Approx(1.7 * c1.bucket[i] + c2.bucket[i]).epsilon(1e-12));
    CHECK(sm.bucket[i] == doctest::Approx(1.7 * s1.bucket[i] + s2.bucket[i]).epsilon(1e-12));
    CHECK((*sm.monitor)[i] ==
          doctest::Approx(1.7 * (*s1.monitor)[i] + (*s2.monitor)[i]).epsilon(1e-12));
  }
}

TEST_CASE("measurements are bit-identical across thread counts") {
  const auto patterns = hadamard_pattern_set(16);
  const auto target = builtin_target("letters", 16);
  const auto model = model_of(DisturbanceKind::global_spatial, -10.0);
  const auto a = measure_spc(target, patterns, model, {}, {}, 3, 1);
  const auto b = measure_spc(target, patterns, model, {}, {}, 3, 7);
  CHECK(a.bucket == b.bucket);
  CHECK(*a.monitor == *b.monitor);
  CHECK(measure_cgi(target, patterns, model, {}, 3, 1).bucket ==
        measure_cgi(target, patterns, model, {}, 3, 5).bucket);
  CHECK(a.provenance.seed == 3);
  CHECK(a.provenance.model_digest == b.provenance.model_digest);
  CHECK(a.provenance.model_digest.size() == 16);
}

TEST_CASE("monitor values are positive for a reflective target") {
  const auto patterns = hadamard_pattern_set(4);
  ImageGrid target(4, 4, 0.0);
  target = ImageGrid::square(4, {0, 0, 0, 0, 0, 0.01, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0});
  const auto s = measure_spc(target, patterns, model_of(DisturbanceKind::intensity_fluctuation, 0, 0.5),
                             {}, {}, 8);
  for (double m : *s.monitor) CHECK(m > 0.0);
}

TEST_CASE("detection error paths") {
  const auto patterns = hadamard_pattern_set(4);
  const ImageGrid wrong(8, 8, 0.5);
  const auto none = model_of(DisturbanceKind::none);
  CHECK_THROWS_AS(measure_cgi(wrong, patterns, none, {}, 1), std::invalid_argument);
  CHECK_THROWS_AS(measure_spc(wrong, patterns, none, {}, {}, 1), std::invalid_argument);
  const ImageGrid ok(4, 4, 0.5);
  CHECK_THROWS_AS(measure_cgi(ok, patterns, none, {0.0, std::nullopt}, 1), std::invalid_argument);
  CHECK_THROWS_AS(measure_spc(ok, patterns, none, {}, {true, 1.0}, 1), std::invalid_argument);
  CHECK_NOTHROW(measure_spc(ok, patterns, none, {}, {false, 1.0}, 1));
}

TEST_CASE("series CSV") {
  MeasurementSeries s;
  s.bucket = {1.5, 2.0};
  CHECK(series_to_csv(s) == "shot_index,bucket,monitor\n0,1.5,\n1,2,\n");
  s.monitor = std::vector<double>{0.25, 0.5};
  CHECK(series_to_csv(s) == "shot_index,bucket,monitor\n0,1.5,0.25\n1,2,0.5\n");
}

TEST_CASE("method names") {
  for (auto m : {Method::cgi, Method::spc, Method::spc_corrected}) CHECK(parse_method(to_string(m)) == m);
  CHECK_THROWS_AS(parse_method("dgi"), std::invalid_argument);
}
