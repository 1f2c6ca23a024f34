#include "datacopy/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "datacopy/errors.hpp"

namespace datacopy {

namespace {

void require_same_dim(std::size_t a, std::size_t b, const char* where) {
  if (a != b) {
    throw ValidationError(std::string(where) + ": dimension mismatch (" +
                          std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

PointSet::PointSet(int dim) : dim_(dim) {
  if (dim < 1) throw ValidationError("PointSet: dimension must be >= 1");
}

PointSet PointSet::from_points(const std::vector<Point>& pts) {
  if (pts.empty()) return PointSet{};
  PointSet ps(static_cast<int>(pts.front().size()));
  ps.reserve(pts.size());
  for (const auto& p : pts) ps.push_back(p);
  return ps;
}

Point PointSet::point(std::size_t i) const {
  auto s = (*this)[i];
  return Point(s.begin(), s.end());
}

void PointSet::push_back(std::span<const double> p) {
  if (dim_ == 0) {
    if (p.empty()) throw ValidationError("PointSet: points must have dimension >= 1");
    dim_ = static_cast<int>(p.size());
  }
  require_same_dim(p.size(), static_cast<std::size_t>(dim_), "PointSet::push_back");
  data_.insert(data_.end(), p.begin(), p.end());
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  require_same_dim(a.size(), b.size(), "distance");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

std::size_t count_in_ball(const PointSet& ps, const Ball& ball) {
  if (!ps.empty()) {
    require_same_dim(ball.center.size(), static_cast<std::size_t>(ps.dim()), "count_in_ball");
  }
  std::size_t count = 0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (distance(ps[i], ball.center) <= ball.radius) ++count;
  }
  return count;
}

std::vector<double> sorted_distances(const PointSet& ps, std::span<const double> center) {
  if (ps.empty()) throw ValidationError("sorted_distances: point set is empty");
  require_same_dim(center.size(), static_cast<std::size_t>(ps.dim()), "sorted_distances");
  std::vector<double> dists(ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i) dists[i] = distance(ps[i], center);
  std::sort(dists.begin(), dists.end());
  return dists;
}

bool union_membership(std::span<const Ball> balls, std::span<const double> pt) {
  for (const Ball& b : balls) {
    if (distance(b.center, pt) <= b.radius) return true;
  }
  return false;
}

}  // namespace datacopy
