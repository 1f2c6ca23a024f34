#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <memory>

#include "datacopy/detector.hpp"
#include "datacopy/distributions.hpp"
#include "datacopy/errors.hpp"
#include "datacopy/mass.hpp"
#include "datacopy/rng.hpp"

using namespace datacopy;

namespace {

// Applies an affine map to another sampler's output stream.
class TransformedSampler final : public SamplerOracle {
 public:
  TransformedSampler(std::unique_ptr<SamplerOracle> inner,
                     std::function<void(std::span<double>)> fn)
      : inner_(std::move(inner)), fn_(std::move(fn)) {}
  int dim() const override { return inner_->dim(); }
  PointSet draw(std::size_t n) override {
    PointSet pts = inner_->draw(n);
    auto& data = pts.mutable_data();
    const int d = pts.dim();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      fn_(std::span<double>(data.data() + i * d, d));
    }
    return pts;
  }
  void reseed(std::uint64_t seed) override { inner_->reseed(seed); }

 private:
  std::unique_ptr<SamplerOracle> inner_;
  std::function<void(std::span<double>)> fn_;
};

PointSet transform_points(const PointSet& ps, const std::function<void(std::span<double>)>& fn) {
  PointSet out = ps;
  auto& data = out.mutable_data();
  const int d = out.dim();
  for (std::size_t i = 0; i < out.size(); ++i) {
    fn(std::span<double>(data.data() + i * d, d));
  }
  return out;
}

// Reference implementation of the radius rule, straight from the
// definition: all T-distances as candidates, filter by the gamma cap,
// maximum radius winning the lambda race.
double brute_force_copy_radius(std::span<const double> x, const PointSet& S, const PointSet& T,
                               const DetectionParams& params, int k) {
  const auto sorted_s = sorted_distances(S, x);
  const RegularityParams reg{k, params.b};
  double best = 0.0;
  for (std::size_t z = 0; z < T.size(); ++z) {
    const double r = distance(T[z], x);
    const double est = est_mass_from_sorted(sorted_s, r, reg);
    if (est > params.gamma) continue;
    const double q_i =
        static_cast<double>(count_in_ball(T, Ball{Point(x.begin(), x.end()), r})) / T.size();
    if (q_i >= params.lambda * est && r > best) best = r;
  }
  return best;
}

}  // namespace

TEST_CASE("theoretical_m closed form") {
  CHECK(theoretical_m(2, 2000, 0.05, 0.5) == 17748323348285LL);
  // dominant-term scaling: doubling n roughly quadruples m
  for (const long long n : {100LL, 1000LL, 5000LL}) {
    const double ratio = static_cast<double>(theoretical_m(2, 2 * n, 0.05, 0.5)) /
                         static_cast<double>(theoretical_m(2, n, 0.05, 0.5));
    CHECK(ratio >= 4.0);
    CHECK(ratio <= 4.4);
  }
  CHECK(theoretical_m(2, 50, 0.05, 1.0) == theoretical_m(2, 50, 0.05, 1.0));
  CHECK_THROWS_AS(theoretical_m(0, 10, 0.05, 0.5), ValidationError);
}

TEST_CASE("find_copy_radius agrees with the brute-force rule on random inputs") {
  RandomStream rng(97);
  for (int trial = 0; trial < 20; ++trial) {
    PointSet S(2), T(2);
    std::vector<double> p(2);
    for (int i = 0; i < 60; ++i) {
      p[0] = rng.uniform(-1, 1);
      p[1] = rng.uniform(-1, 1);
      S.push_back(p);
    }
    for (int i = 0; i < 300; ++i) {
      p[0] = rng.uniform(-1.2, 1.2);
      p[1] = rng.uniform(-1.2, 1.2);
      T.push_back(p);
    }
    DetectionParams params;
    params.lambda = rng.uniform(1.2, 6.0);
    params.gamma = rng.uniform(0.01, 0.9);
    params.b = 10;
    params.k = 2;
    params.m = 300;
    const auto x = S[trial % S.size()];
    CHECK(find_copy_radius(x, S, T, params) ==
          brute_force_copy_radius(x, S, T, params, params.k));
  }
}

TEST_CASE("find_copy_radius trivial regimes") {
  RandomStream rng(3);
  PointSet S(2);
  std::vector<double> p(2);
  for (int i = 0; i < 50; ++i) {
    p[0] = rng.uniform(-1, 1);
    p[1] = rng.uniform(-1, 1);
    S.push_back(p);
  }
  DetectionParams params;
  params.lambda = 2.0;
  params.gamma = 1e-6;  // tiny cap filters all positive candidates
  params.b = 10;
  params.k = 2;
  params.m = 100;

  PointSet far(2);
  for (int i = 0; i < 100; ++i) {
    p[0] = 50.0 + rng.uniform(0, 1);
    p[1] = 50.0 + rng.uniform(0, 1);
    far.push_back(p);
  }
  CHECK(find_copy_radius(S[0], S, far, params) == 0.0);

  // q with no mass near x_i stays at zero even with a generous cap
  params.gamma = 0.3;
  CHECK(find_copy_radius(S[0], S, far, params) == 0.0);
}

TEST_CASE("find_copy_radius recovers the gamma-capped arc radius on the circle") {
  // p uniform on the unit circle; q = 0.5 atom at x_1 + 0.5 p. With
  // lambda = 2, gamma = 0.05 the cap binds first: the expected radius is
  // 2 sin(pi gamma / 2) = 0.15692.
  const auto circle = unit_circle();
  const PointSet S = circle->sample(20000, 511);
  const Point x1 = S.point(0);

  PointSet atom_pts(2);
  atom_pts.push_back(x1);
  const auto q = std::make_shared<CopierMixture>(
      0.5, std::make_shared<PointAtoms>(atom_pts), circle);
  const PointSet T = q->sample(100000, 512);

  DetectionParams params;
  params.lambda = 2.0;
  params.gamma = 0.05;
  params.b = 400;
  params.k = 1;
  params.m = 100000;

  const double expected = 2.0 * std::sin(std::numbers::pi * params.gamma / 2.0);
  const double r = find_copy_radius(x1, S, T, params);
  CHECK(r > 0.8 * expected);
  CHECK(r < 1.2 * expected);
}

TEST_CASE("detect on a faraway constant sampler reports zero") {
  const auto moons = std::make_shared<Halfmoons>(0.1);
  const PointSet S = moons->sample(300, 21);

  PointSet far(2);
  far.push_back(Point{500.0, 500.0});
  AnalyticSampler q(std::make_shared<PointAtoms>(far), 1);

  DetectionParams params;
  params.lambda = 5.0;
  params.gamma = 0.001;
  params.epsilon = 0.3;
  params.m = 5000;
  params.b = 50;
  params.k = 2;
  params.seed = 17;
  const DetectionReport rep = detect(S, q, params, 2);
  CHECK(rep.cr_hat == 0.0);
  CHECK(rep.regions.size() == S.size());
  for (const auto& region : rep.regions) CHECK(region.radius == 0.0);
}

TEST_CASE("detect flags the uniform-over-S copier at rate one") {
  const auto moons = std::make_shared<Halfmoons>(0.1);
  const PointSet S = moons->sample(300, 42);
  AnalyticSampler q(std::make_shared<PointAtoms>(S), 7);

  DetectionParams params;
  params.lambda = 5.0;
  params.gamma = 0.001;
  params.epsilon = 0.3;
  params.m = 20000;
  params.b = 50;
  params.k = 2;
  params.seed = 99;
  const DetectionReport rep = detect(S, q, params, 2);
  CHECK(rep.cr_hat >= 0.95);
  CHECK(static_cast<double>(rep.v_count) == rep.cr_hat * static_cast<double>(rep.u_used));
}

TEST_CASE("detect is deterministic per seed and sensitive to it") {
  const auto moons = std::make_shared<Halfmoons>(0.1);
  const PointSet S = moons->sample(200, 5);
  DetectionParams params;
  params.lambda = 3.0;
  params.gamma = 0.01;
  params.epsilon = 0.3;
  params.m = 4000;
  params.b = 40;
  params.k = 2;
  params.seed = 1234;

  AnalyticSampler q1(moons, 0), q2(moons, 0);
  const DetectionReport a = detect(S, q1, params, 1);
  const DetectionReport b = detect(S, q2, params, 2);  // thread count must not matter
  CHECK(a.cr_hat == b.cr_hat);
  CHECK(a.v_count == b.v_count);
  for (std::size_t i = 0; i < a.regions.size(); ++i) {
    CHECK(a.regions[i].radius == b.regions[i].radius);
  }

  params.seed = 1235;
  AnalyticSampler q3(moons, 0);
  const DetectionReport c = detect(S, q3, params, 2);
  CHECK(a.cr_hat != c.cr_hat);  // a different stream almost surely moves the count
}

TEST_CASE("detect counts and rate are invariant under isometries and doubling") {
  const auto moons = std::make_shared<Halfmoons>(0.1);
  const PointSet S = moons->sample(250, 77);

  DetectionParams params;
  params.lambda = 3.0;
  params.gamma = 0.01;
  params.epsilon = 0.3;
  params.m = 6000;
  params.b = 40;
  params.k = 2;
  params.seed = 4321;

  auto run = [&](const PointSet& s, std::unique_ptr<SamplerOracle> sampler) {
    return detect(s, *sampler, params, 2);
  };
  const DetectionReport base =
      run(S, std::make_unique<AnalyticSampler>(moons, 0));

  SUBCASE("translation") {
    auto shift = [](std::span<double> p) {
      p[0] += 11.0;
      p[1] -= 7.0;
    };
    const DetectionReport moved = run(
        transform_points(S, shift),
        std::make_unique<TransformedSampler>(std::make_unique<AnalyticSampler>(moons, 0), shift));
    CHECK(moved.cr_hat == base.cr_hat);
    CHECK(moved.v_count == base.v_count);
    for (std::size_t i = 0; i < base.regions.size(); ++i) {
      CHECK(moved.regions[i].radius == doctest::Approx(base.regions[i].radius).epsilon(1e-9));
    }
  }

  SUBCASE("right-angle rotation") {
    auto rot = [](std::span<double> p) {
      const double x = p[0];
      p[0] = -p[1];
      p[1] = x;
    };
    const DetectionReport rotated = run(
        transform_points(S, rot),
        std::make_unique<TransformedSampler>(std::make_unique<AnalyticSampler>(moons, 0), rot));
    CHECK(rotated.cr_hat == base.cr_hat);
    CHECK(rotated.v_count == base.v_count);
    for (std::size_t i = 0; i < base.regions.size(); ++i) {
      CHECK(rotated.regions[i].radius == base.regions[i].radius);
    }
  }

  SUBCASE("doubling") {
    auto scale = [](std::span<double> p) {
      p[0] *= 2.0;
      p[1] *= 2.0;
    };
    const DetectionReport doubled = run(
        transform_points(S, scale),
        std::make_unique<TransformedSampler>(std::make_unique<AnalyticSampler>(moons, 0), scale));
    CHECK(doubled.cr_hat == base.cr_hat);
    CHECK(doubled.v_count == base.v_count);
    for (std::size_t i = 0; i < base.regions.size(); ++i) {
      CHECK(doubled.regions[i].radius == 2.0 * base.regions[i].radius);
    }
  }
}

TEST_CASE("radii shrink as lambda rises and as gamma falls") {
  RandomStream rng(2718);
  const auto moons = std::make_shared<Halfmoons>(0.1);
  const PointSet S = moons->sample(120, 9);
  const PointSet T = moons->sample(3000, 10);

  DetectionParams params;
  params.b = 20;
  params.k = 2;
  params.m = 3000;

  for (int trial = 0; trial < 10; ++trial) {
    params.lambda = rng.uniform(1.1, 3.0);
    params.gamma = rng.uniform(0.02, 0.5);
    const std::size_t i = rng.index(S.size());

    DetectionParams harder = params;
    harder.lambda = params.lambda * rng.uniform(1.1, 3.0);
    CHECK(find_copy_radius(S[i], S, T, harder) <= find_copy_radius(S[i], S, T, params));

    DetectionParams tighter = params;
    tighter.gamma = params.gamma * rng.uniform(0.05, 0.9);
    CHECK(find_copy_radius(S[i], S, T, tighter) <= find_copy_radius(S[i], S, T, params));
  }
}

TEST_CASE("detect validation errors") {
  const auto moons = std::make_shared<Halfmoons>(0.1);
  const PointSet S = moons->sample(30, 2);
  AnalyticSampler q(moons, 0);

  DetectionParams params;
  params.b = 100;  // exceeds |S|
  params.k = 2;
  params.m = 100;
  CHECK_THROWS_AS(detect(S, q, params, 1), ValidationError);

  DetectionParams bad;
  bad.lambda = 1.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = DetectionParams{};
  bad.gamma = 1.5;
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  const auto cube3 = std::make_shared<UniformCube>(1.0, 3);
  AnalyticSampler q3(cube3, 0);
  DetectionParams small;
  small.b = 5;
  small.k = 2;
  small.m = 50;
  CHECK_THROWS_AS(detect(S, q3, small, 1), ValidationError);
}

TEST_CASE("detect resolves u_size from the proof constant") {
  DetectionParams params;
  params.epsilon = 0.1;
  params.delta = 0.05;
  params.u_size = 0;
  CHECK(params.resolved_u() == 5992);  // ceil(20 ln 20 / 0.01)
  params.u_size = 777;
  CHECK(params.resolved_u() == 777);
}
