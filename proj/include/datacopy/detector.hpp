#pragma once

#include <cstdint>
#include <vector>

#include "datacopy/geometry.hpp"
#include "datacopy/sampler.hpp"

namespace datacopy {

struct DetectionParams {
  double lambda = 20.0;     // overrepresentation factor, > 1
  double gamma = 0.00025;   // max copy-region mass, in (0, 1)
  double epsilon = 0.1;     // tolerance
  double delta = 0.05;      // failure probability
  long long m = 200000;     // generated-sample size
  long long u_size = 0;     // 0 resolves to ceil(20 ln(1/delta) / epsilon^2)
  int b = 400;              // mass-estimator threshold count
  int k = 0;                // regularity constant; 0 means estimate from S
  std::uint64_t seed = 0;

  void validate() const;
  long long resolved_u() const;
};

struct CopyRegion {
  std::size_t train_index = 0;
  double radius = 0.0;  // r_i^*
};

struct DetectionReport {
  double cr_hat = 0.0;
  std::vector<CopyRegion> regions;  // one entry per training point
  long long m_used = 0;
  long long u_used = 0;
  long long v_count = 0;
  int k_used = 0;
  DetectionParams params;
  std::uint64_t seed = 0;
  double elapsed_seconds = 0.0;
};

// Generated-sample size ceil(2048 n^2 (d+2) ln(98304 n^2 (d+2) /
// (delta eps^2 min(eps,1)^2)) / (eps^2 min(eps,1)^2)) for guarantee mode.
long long theoretical_m(int d, long long n, double delta, double epsilon);

// Maximal radius around x_i at which the empirical q-mass over T is at
// least lambda times the estimated p-mass, among candidate radii (the
// distances from T to x_i plus zero) whose estimated mass stays within
// gamma. Zero when no positive candidate qualifies.
double find_copy_radius(std::span<const double> x_i, const PointSet& S, const PointSet& T,
                        const DetectionParams& params);

// End-to-end detector: draws T and U from the oracle (reseeded with
// params.seed when supported), finds every copy radius, and reports the
// fraction of U falling inside the union of copy balls. Deterministic given
// (S, sampler stream, seed); thread count never changes results.
DetectionReport detect(const PointSet& S, SamplerOracle& q, const DetectionParams& params,
                       int threads = 0);

}  // namespace datacopy
