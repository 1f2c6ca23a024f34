#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace datacopy {

using Point = std::vector<double>;

// Ordered collection of points in d-dimensional Euclidean space.
// Immutable once filled; iteration order is insertion order.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(int dim);

  static PointSet from_points(const std::vector<Point>& pts);

  int dim() const { return dim_; }
  std::size_t size() const { return dim_ > 0 ? data_.size() / dim_ : 0; }
  bool empty() const { return data_.empty(); }

  std::span<const double> operator[](std::size_t i) const {
    return {data_.data() + i * dim_, static_cast<std::size_t>(dim_)};
  }
  Point point(std::size_t i) const;

  void push_back(std::span<const double> p);
  void reserve(std::size_t n) { data_.reserve(n * (dim_ > 0 ? dim_ : 1)); }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& mutable_data() { return data_; }

 private:
  int dim_ = 0;
  std::vector<double> data_;
};

// Closed Euclidean ball; the boundary is inside.
struct Ball {
  Point center;
  double radius = 0.0;
};

double squared_distance(std::span<const double> a, std::span<const double> b);
double distance(std::span<const double> a, std::span<const double> b);

// Number of points of ps with distance(center, p) <= radius.
std::size_t count_in_ball(const PointSet& ps, const Ball& ball);

// Ascending distances from center to every point of ps. The b-th smallest
// element (1-indexed) is the minimal radius whose closed ball holds >= b
// points.
std::vector<double> sorted_distances(const PointSet& ps, std::span<const double> center);

// True iff pt lies in at least one of the closed balls.
bool union_membership(std::span<const Ball> balls, std::span<const double> pt);

}  // namespace datacopy
