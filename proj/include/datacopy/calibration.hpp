#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "datacopy/detector.hpp"
#include "datacopy/distributions.hpp"

namespace datacopy {

// Detector outputs under the null q = p, one value per freshly drawn
// training set.
struct NullDistribution {
  std::vector<double> values;
  std::uint64_t seed = 0;
};

struct SignificanceDecision {
  double p_value = 0.0;
  double alpha = 0.05;
  bool significant = false;  // p_value <= alpha, boundary inclusive
};

// Runs the detector `runs` times against q = p, drawing a fresh S ~ p^n per
// run with a derived seed. Runs execute in parallel; results are ordered by
// run index.
NullDistribution null_calibrate(const AnalyticDistribution& p, std::size_t n,
                                const DetectionParams& params, int runs, std::uint64_t seed,
                                int threads = 0);

// Fraction of null values strictly above the observed value. Small values
// indicate copying. The non-strict variant counts ties as well.
double p_value(const NullDistribution& null_dist, double observed, bool strict = true);

SignificanceDecision decide(double p, double alpha);

// Cache key over everything that determines the null distribution.
std::string null_cache_key(const std::string& dist_id, std::size_t n,
                           const DetectionParams& params, int runs, std::uint64_t seed);

void save_null_csv(const std::filesystem::path& path, const NullDistribution& null_dist,
                   const std::string& key);
std::optional<NullDistribution> load_null_csv(const std::filesystem::path& path,
                                              const std::string& key);

// Loads the keyed cache entry from cache_dir or calibrates and stores it.
NullDistribution null_calibrate_cached(const std::filesystem::path& cache_dir,
                                       const AnalyticDistribution& p, std::size_t n,
                                       const DetectionParams& params, int runs,
                                       std::uint64_t seed, int threads = 0);

}  // namespace datacopy
