#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "datacopy/calibration.hpp"
#include "datacopy/errors.hpp"
#include "datacopy/rng.hpp"

using namespace datacopy;

namespace {

DetectionParams small_params() {
  DetectionParams p;
  p.lambda = 5.0;
  p.gamma = 0.005;
  p.epsilon = 0.5;
  p.delta = 0.1;
  p.m = 2000;
  p.b = 30;
  p.k = 2;
  return p;
}

}  // namespace

TEST_CASE("null_calibrate produces in-range deterministic values") {
  const Halfmoons moons(0.1);
  const auto params = small_params();

  const NullDistribution one = null_calibrate(moons, 150, params, 1, 7, 1);
  REQUIRE(one.values.size() == 1);
  CHECK(one.values[0] >= 0.0);
  CHECK(one.values[0] <= 1.0);

  const NullDistribution a = null_calibrate(moons, 150, params, 8, 7, 2);
  const NullDistribution b = null_calibrate(moons, 150, params, 8, 7, 1);
  CHECK(a.values == b.values);  // parallel schedule does not change results
  for (double v : a.values) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  CHECK_THROWS_AS(null_calibrate(moons, 150, params, 0, 7, 1), ValidationError);
}

TEST_CASE("p_value counts strictly larger null values") {
  NullDistribution null_dist;
  null_dist.values = {0.0, 0.0, 0.1, 0.2, 0.5};

  CHECK(p_value(null_dist, 0.9) == 0.0);   // above everything
  CHECK(p_value(null_dist, -0.1) == 1.0);  // below everything
  CHECK(p_value(null_dist, 0.0) == doctest::Approx(3.0 / 5.0));
  CHECK(p_value(null_dist, 0.0, /*strict=*/false) == 1.0);
  CHECK(p_value(null_dist, 0.2) == doctest::Approx(1.0 / 5.0));

  // nonincreasing in the observed value
  double prev = 1.0;
  for (double obs = 0.0; obs <= 1.0; obs += 0.05) {
    const double p = p_value(null_dist, obs);
    CHECK(p <= prev);
    prev = p;
  }
  CHECK_THROWS_AS(p_value(NullDistribution{}, 0.5), ValidationError);
}

TEST_CASE("decide uses an inclusive boundary") {
  CHECK(decide(0.0, 0.05).significant);
  CHECK_FALSE(decide(1.0, 0.05).significant);
  CHECK(decide(0.05, 0.05).significant);
  CHECK_THROWS_AS(decide(-0.1, 0.05), ValidationError);
  CHECK_THROWS_AS(decide(0.5, 1.5), ValidationError);
}

TEST_CASE("p_value is super-uniform under the null") {
  // 200 meta-trials: observed and null values drawn from one process
  RandomStream rng(2025);
  auto draw_cr = [&rng] {
    // a cr-like value: a small binomial count over 100 trials
    int hits = 0;
    for (int i = 0; i < 100; ++i) hits += rng.uniform() < 0.02;
    return hits / 100.0;
  };
  int rejections = 0;
  const int meta_trials = 200;
  const int runs = 100;
  for (int t = 0; t < meta_trials; ++t) {
    NullDistribution null_dist;
    null_dist.values.resize(runs);
    for (int r = 0; r < runs; ++r) null_dist.values[r] = draw_cr();
    if (p_value(null_dist, draw_cr()) <= 0.05) ++rejections;
  }
  const double rate = static_cast<double>(rejections) / meta_trials;
  CHECK(rate <= 0.05 + 2.0 / std::sqrt(static_cast<double>(runs)));
}

TEST_CASE("null cache round-trips and keys on parameters") {
  const auto params = small_params();
  const std::string key = null_cache_key("halfmoons(sigma=0.1)", 150, params, 8, 7);

  DetectionParams other = params;
  other.lambda *= 2.0;
  CHECK(key != null_cache_key("halfmoons(sigma=0.1)", 150, other, 8, 7));
  CHECK(key != null_cache_key("halfmoons(sigma=0.1)", 151, params, 8, 7));

  NullDistribution nd;
  nd.seed = 7;
  nd.values = {0.0, 0.25, 1e-3, 0.125};
  const auto dir = std::filesystem::temp_directory_path() / "datacopy_cache_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "null_test.csv";
  save_null_csv(path, nd, key);
  const auto loaded = load_null_csv(path, key);
  REQUIRE(loaded.has_value());
  CHECK(loaded->seed == nd.seed);
  CHECK(loaded->values == nd.values);
  CHECK_FALSE(load_null_csv(path, "different-key").has_value());
  std::filesystem::remove_all(dir);
}

TEST_CASE("null_calibrate_cached reuses stored runs") {
  const Halfmoons moons(0.1);
  const auto params = small_params();
  const auto dir = std::filesystem::temp_directory_path() / "datacopy_cache_test2";
  std::filesystem::remove_all(dir);

  const NullDistribution first = null_calibrate_cached(dir, moons, 150, params, 6, 11, 2);
  const NullDistribution second = null_calibrate_cached(dir, moons, 150, params, 6, 11, 2);
  CHECK(first.values == second.values);
  std::filesystem::remove_all(dir);
}
