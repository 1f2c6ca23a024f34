#include "datacopy/sampler.hpp"

#include <string>

#include "datacopy/distributions.hpp"
#include "datacopy/errors.hpp"

namespace datacopy {

AnalyticSampler::AnalyticSampler(std::shared_ptr<const AnalyticDistribution> dist,
                                 std::uint64_t seed)
    : dist_(std::move(dist)), rng_(seed) {
  if (!dist_) throw ValidationError("AnalyticSampler: distribution is null");
}

int AnalyticSampler::dim() const { return dist_->dim(); }

PointSet AnalyticSampler::draw(std::size_t n) { return dist_->sample(n, rng_); }

PointSet PointSetSampler::draw(std::size_t n) {
  if (cursor_ + n > points_.size()) {
    throw ValidationError("PointSetSampler: stream exhausted (requested " + std::to_string(n) +
                          ", remaining " + std::to_string(points_.size() - cursor_) + ")");
  }
  PointSet out(points_.dim());
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(points_[cursor_ + i]);
  cursor_ += n;
  return out;
}

}  // namespace datacopy
