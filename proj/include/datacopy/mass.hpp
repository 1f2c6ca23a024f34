#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "datacopy/geometry.hpp"

namespace datacopy {

struct RegularityParams {
  int k = 1;    // regularity constant; the intrinsic dimension in practice
  int b = 400;  // interpolation threshold count
};

struct EstimatorConfig {
  double epsilon = 1.0;
  double delta = 0.05;
  std::optional<long long> b_override;
};

// Sample size threshold ceil(400 (d+2) ln(16 n / delta) / min(eps,1)^2)
// for guarantee-mode ball-mass estimation.
long long theoretical_b(int d, long long n, double delta, double epsilon);

// Integer power by squaring; monotone nondecreasing in x for x >= 0.
double ipow(double x, int k);

// Ball-mass estimate. Let r_* be the b-th smallest distance from the query
// point to S. Below r_* the empirical mass b/n is interpolated down by
// (r/r_*)^k; at or above r_* the plain empirical count is used. Both
// branches meet at b/n when r = r_*.
double est_mass_from_sorted(std::span<const double> sorted_dists, double r,
                            const RegularityParams& params);
double est_mass(std::span<const double> x, double r, const PointSet& S,
                const RegularityParams& params);

// Threshold count ceil(64 (d+2) ln(16 n / delta) / eps^2) used by the
// regularity-constant estimator.
long long estimate_k_threshold(int d, long long n, double delta, double epsilon);

// Estimates the regularity constant from the ratio of the 2b-th and b-th
// nearest-neighbor radii of an anchor point: round(1 / log2(r_* / s_*)).
// The anchor is the first point of S; the seeded overload picks it at
// random.
int estimate_k(const PointSet& S, const EstimatorConfig& cfg);
int estimate_k(const PointSet& S, const EstimatorConfig& cfg, std::uint64_t anchor_seed);

}  // namespace datacopy
