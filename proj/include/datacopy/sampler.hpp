#pragma once

#include <cstdint>
#include <memory>

#include "datacopy/geometry.hpp"
#include "datacopy/rng.hpp"

namespace datacopy {

class AnalyticDistribution;

// Source of generated points: the detector's only access to q.
class SamplerOracle {
 public:
  virtual ~SamplerOracle() = default;
  virtual int dim() const = 0;
  virtual PointSet draw(std::size_t n) = 0;
  // Restarts the stream where the backing source supports it. External
  // processes ignore this.
  virtual void reseed(std::uint64_t /*seed*/) {}
};

// Streams draws from an analytic distribution.
class AnalyticSampler final : public SamplerOracle {
 public:
  AnalyticSampler(std::shared_ptr<const AnalyticDistribution> dist, std::uint64_t seed);
  int dim() const override;
  PointSet draw(std::size_t n) override;
  void reseed(std::uint64_t seed) override { rng_ = RandomStream(seed); }

 private:
  std::shared_ptr<const AnalyticDistribution> dist_;
  RandomStream rng_;
};

// Streams a pre-drawn point set; draws beyond the stored points fail.
// reseed restarts from the beginning.
class PointSetSampler final : public SamplerOracle {
 public:
  explicit PointSetSampler(PointSet points) : points_(std::move(points)) {}
  int dim() const override { return points_.dim(); }
  PointSet draw(std::size_t n) override;
  void reseed(std::uint64_t /*seed*/) override { cursor_ = 0; }

 private:
  PointSet points_;
  std::size_t cursor_ = 0;
};

}  // namespace datacopy
