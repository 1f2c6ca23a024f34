#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "datacopy/errors.hpp"
#include "datacopy/geometry.hpp"
#include "datacopy/rng.hpp"

using namespace datacopy;

namespace {

PointSet random_points(RandomStream& rng, std::size_t n, int dim, double scale = 1.0) {
  PointSet ps(dim);
  std::vector<double> p(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (double& v : p) v = rng.uniform(-scale, scale);
    ps.push_back(p);
  }
  return ps;
}

}  // namespace

TEST_CASE("distance basics") {
  CHECK(distance(Point{0, 0}, Point{0, 0}) == 0.0);
  CHECK(distance(Point{0, 0}, Point{3, 4}) == 5.0);

  RandomStream rng(7);
  for (int i = 0; i < 100; ++i) {
    const double h = rng.uniform(0.0, 10.0);
    CHECK(distance(Point{1, 1}, Point{1, 1 + h}) == doctest::Approx(h).epsilon(1e-15));
  }
  CHECK_THROWS_AS(distance(Point{1}, Point{1, 2}), ValidationError);
}

TEST_CASE("distance is symmetric and satisfies the triangle inequality") {
  RandomStream rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    Point a{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
    Point b{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
    Point c{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
    CHECK(distance(a, b) == distance(b, a));
    CHECK(distance(a, c) <= distance(a, b) + distance(b, c) + 1e-12);
  }
}

TEST_CASE("count_in_ball boundaries are inclusive") {
  PointSet ps = PointSet::from_points({{0, 0}, {2, 0}});
  CHECK(count_in_ball(ps, Ball{{0, 0}, 2.0}) == 2);
  CHECK(count_in_ball(ps, Ball{{0, 0}, 1.9}) == 1);
  CHECK(count_in_ball(ps, Ball{{2, 0}, 0.0}) >= 1);
  CHECK_THROWS_AS(count_in_ball(ps, Ball{{0, 0, 0}, 1.0}), ValidationError);
}

TEST_CASE("count_in_ball is nondecreasing in r and matches a brute-force rescan") {
  RandomStream rng(23);
  const PointSet ps = random_points(rng, 200, 2, 3.0);
  for (int q = 0; q < 100; ++q) {
    Point c{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const double r1 = rng.uniform(0.0, 3.0);
    const double r2 = r1 + rng.uniform(0.0, 3.0);
    const std::size_t c1 = count_in_ball(ps, Ball{c, r1});
    const std::size_t c2 = count_in_ball(ps, Ball{c, r2});
    CHECK(c1 <= c2);

    std::size_t brute = 0;
    for (std::size_t i = 0; i < ps.size(); ++i) {
      double s = 0;
      for (int j = 0; j < 2; ++j) s += (ps[i][j] - c[j]) * (ps[i][j] - c[j]);
      if (std::sqrt(s) <= r1) ++brute;
    }
    CHECK(c1 == brute);
  }
}

TEST_CASE("sorted_distances examples") {
  PointSet ps = PointSet::from_points({{0, 0}, {3, 4}, {0, 1}});
  const auto d = sorted_distances(ps, Point{0, 0});
  REQUIRE(d.size() == 3);
  CHECK(d[0] == 0.0);
  CHECK(d[1] == 1.0);
  CHECK(d[2] == 5.0);
  // b = 2: the minimal radius holding two points
  CHECK(d[1] == 1.0);
  CHECK(count_in_ball(ps, Ball{{0, 0}, d[1]}) >= 2);

  PointSet dup = PointSet::from_points({{1, 1}, {1, 1}, {2, 2}});
  const auto dd = sorted_distances(dup, Point{1, 1});
  CHECK(dd[0] == 0.0);
  CHECK(dd[1] == 0.0);

  CHECK_THROWS_AS(sorted_distances(PointSet{}, Point{0, 0}), ValidationError);
}

TEST_CASE("sorted_distances b-th element is the minimal radius holding b points") {
  RandomStream rng(37);
  const PointSet ps = random_points(rng, 60, 3, 2.0);
  Point c{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
  const auto d = sorted_distances(ps, c);
  for (std::size_t b = 1; b <= ps.size(); b += 7) {
    const double r = d[b - 1];
    CHECK(count_in_ball(ps, Ball{c, r}) >= b);
    if (r > 0.0) {
      CHECK(count_in_ball(ps, Ball{c, std::nextafter(r, -1.0)}) < b);
    }
  }
}

TEST_CASE("union_membership") {
  std::vector<Ball> balls{Ball{{0, 0}, 1.0}};
  CHECK(union_membership(balls, Point{0, 1}));  // boundary inclusive
  CHECK_FALSE(union_membership({}, Point{0, 0}));

  std::vector<Ball> overlapping{Ball{{0, 0}, 1.0}, Ball{{0.5, 0}, 1.0}};
  CHECK(union_membership(overlapping, Point{0.2, 0}));
  CHECK_FALSE(union_membership(overlapping, Point{9, 9}));
}
