#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "datacopy/baseline.hpp"
#include "datacopy/distributions.hpp"
#include "datacopy/errors.hpp"
#include "datacopy/rng.hpp"

using namespace datacopy;

namespace {

PointSet blob(RandomStream& rng, std::size_t n, double cx, double cy, double sigma) {
  PointSet ps(2);
  std::vector<double> p(2);
  for (std::size_t i = 0; i < n; ++i) {
    p[0] = cx + sigma * rng.gaussian();
    p[1] = cy + sigma * rng.gaussian();
    ps.push_back(p);
  }
  return ps;
}

}  // namespace

TEST_CASE("cmeans with one cluster returns the coordinate-wise mean") {
  RandomStream rng(1);
  const PointSet S = blob(rng, 200, 1.5, -2.0, 0.5);
  const auto [centroids, assignment] = cmeans(S, 1, BaselineParams{});
  REQUIRE(centroids.size() == 1);
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < S.size(); ++i) {
    mx += S[i][0];
    my += S[i][1];
  }
  CHECK(centroids[0][0] == doctest::Approx(mx / S.size()).epsilon(1e-12));
  CHECK(centroids[0][1] == doctest::Approx(my / S.size()).epsilon(1e-12));
  CHECK(std::all_of(assignment.begin(), assignment.end(), [](int a) { return a == 0; }));
}

TEST_CASE("cmeans with c equal to n gives every distinct point its own centroid") {
  PointSet S = PointSet::from_points({{0, 0}, {1, 0}, {0, 1}, {5, 5}});
  const auto [centroids, assignment] = cmeans(S, 4, BaselineParams{});
  REQUIRE(centroids.size() == 4);
  for (std::size_t i = 0; i < S.size(); ++i) {
    bool matched = false;
    for (std::size_t c = 0; c < centroids.size(); ++c) {
      matched = matched || distance(S[i], centroids[c]) == 0.0;
    }
    CHECK(matched);
  }
}

TEST_CASE("cmeans separates two well-spread blobs") {
  RandomStream rng(17);
  PointSet S = blob(rng, 200, 0.0, 0.0, 0.1);
  const PointSet other = blob(rng, 200, 10.0, 10.0, 0.1);
  for (std::size_t i = 0; i < other.size(); ++i) S.push_back(other[i]);

  BaselineParams params;
  params.c = 2;
  params.seed = 3;
  const auto [centroids, assignment] = cmeans(S, 2, params);
  double d00 = distance(centroids[0], Point{0, 0});
  double d01 = distance(centroids[0], Point{10, 10});
  const bool first_is_origin = d00 < d01;
  const auto c_origin = centroids[first_is_origin ? 0 : 1];
  const auto c_far = centroids[first_is_origin ? 1 : 0];
  CHECK(distance(c_origin, Point{0, 0}) < 0.1);
  CHECK(distance(c_far, Point{10, 10}) < 0.1);

  CHECK_THROWS_AS(cmeans(S, 1000, params), ValidationError);
}

TEST_CASE("cmeans keeps every cluster populated") {
  RandomStream rng(23);
  const PointSet S = blob(rng, 50, 0.0, 0.0, 1.0);
  for (int c = 1; c <= 12; ++c) {
    BaselineParams params;
    params.c = c;
    params.seed = 5;
    const auto [centroids, assignment] = cmeans(S, c, params);
    std::vector<int> counts(c, 0);
    for (int a : assignment) ++counts[a];
    for (int cl = 0; cl < c; ++cl) CHECK(counts[cl] > 0);
  }
}

TEST_CASE("zu_statistic closed forms") {
  {
    // delta at the null center gives z = 0
    const std::vector<double> p{1.0, 3.0};
    const std::vector<double> q{2.0, 2.0};
    const auto [delta, z] = zu_statistic(p, q);
    CHECK(delta == 2);
    CHECK(z == 0.0);
  }
  {
    // all P distances below all Q distances: delta = 4, z = 2/sqrt(20/12)
    const std::vector<double> p{0.1, 0.2};
    const std::vector<double> q{0.9, 0.8};
    const auto [delta, z] = zu_statistic(p, q);
    CHECK(delta == 4);
    CHECK(z == doctest::Approx(1.5491933384829668).epsilon(1e-12));
  }
  {
    // ties contribute nothing
    const std::vector<double> p{1.0, 1.0};
    const std::vector<double> q{1.0, 1.0};
    const auto [delta, z] = zu_statistic(p, q);
    CHECK(delta == 0);
    CHECK(z < 0.0);
  }
  CHECK_THROWS_AS(zu_statistic({}, std::vector<double>{1.0}), ValidationError);
}

TEST_CASE("zu_statistic is a rank statistic") {
  RandomStream rng(29);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> p(20), q(30);
    for (double& v : p) v = rng.uniform(0.0, 4.0);
    for (double& v : q) v = rng.uniform(0.0, 4.0);

    const auto [d1, z1] = zu_statistic(p, q);

    // any strictly monotone transform leaves the statistic unchanged
    std::vector<double> pe = p, qe = q;
    for (double& v : pe) v = std::exp(v);
    for (double& v : qe) v = std::exp(v);
    const auto [d2, z2] = zu_statistic(pe, qe);
    CHECK(d1 == d2);
    CHECK(z1 == z2);

    // swapping roles flips the statistic (tie-free almost surely)
    const auto [d3, z3] = zu_statistic(q, p);
    CHECK(d1 + d3 == static_cast<long long>(p.size() * q.size()));
    CHECK(z3 == doctest::Approx(-z1).epsilon(1e-12));
  }
}

TEST_CASE("baseline_test with one cluster reduces to the global statistic") {
  const auto moons = std::make_shared<Halfmoons>(0.1);
  const PointSet S = moons->sample(300, 3);
  const PointSet P = moons->sample(300, 4);
  const PointSet Q = moons->sample(300, 5);

  BaselineParams params;
  params.c = 1;
  const BaselineReport rep = baseline_test(S, P, Q, params);
  REQUIRE(rep.per_cluster.size() == 1);

  std::vector<double> pd, qd;
  for (std::size_t i = 0; i < P.size(); ++i) {
    double best = 1e300;
    for (std::size_t j = 0; j < S.size(); ++j) best = std::min(best, distance(P[i], S[j]));
    pd.push_back(best);
  }
  for (std::size_t i = 0; i < Q.size(); ++i) {
    double best = 1e300;
    for (std::size_t j = 0; j < S.size(); ++j) best = std::min(best, distance(Q[i], S[j]));
    qd.push_back(best);
  }
  const auto [delta, z] = zu_statistic(pd, qd);
  CHECK(rep.per_cluster[0].delta == delta);
  CHECK(rep.min_z == z);
  CHECK(rep.p_value == doctest::Approx(standard_normal_cdf(z)).epsilon(1e-15));
}

TEST_CASE("baseline_test z is roughly standard normal under the null") {
  const auto moons = std::make_shared<Halfmoons>(0.1);
  std::vector<double> zs;
  for (int trial = 0; trial < 20; ++trial) {
    const PointSet S = moons->sample(400, 100 + 3 * trial);
    const PointSet P = moons->sample(400, 101 + 3 * trial);
    const PointSet Q = moons->sample(400, 102 + 3 * trial);
    BaselineParams params;
    params.c = 1;
    zs.push_back(baseline_test(S, P, Q, params).min_z);
  }
  double mean = 0;
  for (double z : zs) mean += z;
  mean /= zs.size();
  double var = 0;
  for (double z : zs) var += (z - mean) * (z - mean);
  var /= zs.size();
  CHECK(std::abs(mean) < 0.45);
  CHECK(std::sqrt(var) > 0.55);
  CHECK(std::sqrt(var) < 1.45);
}

TEST_CASE("baseline_test flags verbatim duplication with a very negative z") {
  const auto moons = std::make_shared<Halfmoons>(0.1);
  const PointSet S = moons->sample(400, 7);
  const PointSet P = moons->sample(400, 8);
  PointSet Q(2);
  for (std::size_t i = 0; i < 400; ++i) Q.push_back(S[i % S.size()]);

  BaselineParams params;
  params.c = 1;
  const BaselineReport rep = baseline_test(S, P, Q, params);
  CHECK(rep.min_z < -10.0);
  CHECK(rep.p_value < 1e-6);
}

TEST_CASE("baseline_test rejects fully degenerate partitions") {
  // two far blobs; P only near the first, Q only near the second
  RandomStream rng(31);
  PointSet S = blob(rng, 100, 0.0, 0.0, 0.1);
  const PointSet far = blob(rng, 100, 100.0, 100.0, 0.1);
  for (std::size_t i = 0; i < far.size(); ++i) S.push_back(far[i]);
  const PointSet P = blob(rng, 50, 0.0, 0.0, 0.1);
  const PointSet Q = blob(rng, 50, 100.0, 100.0, 0.1);

  BaselineParams params;
  params.c = 2;
  params.seed = 11;
  CHECK_THROWS_AS(baseline_test(S, P, Q, params), ValidationError);
}
