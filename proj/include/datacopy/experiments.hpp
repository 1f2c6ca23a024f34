#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "datacopy/calibration.hpp"
#include "datacopy/detector.hpp"
#include "datacopy/distributions.hpp"

namespace datacopy {

// ---------------------------------------------------------------------------
// Halfmoons comparison: the detector against the three-sample baseline over
// copier mixtures of varying weight.

struct HalfmoonsConfig {
  std::size_t n = 2000;
  double sigma = 0.1;
  std::vector<double> rhos{0.0, 0.1, 0.2, 0.3, 0.4};  // 0 means q = p
  std::size_t copy_count = 20;
  double copy_noise = 0.02;
  double underfit_noise = 0.25;
  int reps = 10;          // median p over this many repetitions
  int calib_runs = 200;
  double alpha = 0.05;    // detector significance level
  double z_threshold = -3.0;  // baseline significance: min_z below this
  std::vector<int> cluster_counts{1, 5, 10, 20};
  DetectionParams detection{20.0, 0.00025, 0.1, 0.05, 200000, 0, 400, 2, 0};
  std::uint64_t seed = 1;
  int threads = 0;
  bool quick = false;  // reduced runs/reps, same schema
};

struct ExperimentCell {
  double rho = 0.0;
  std::vector<double> p_values;  // one per repetition
  double median_p = 0.0;
  bool significant = false;
};

struct ExperimentRow {
  std::string method;  // "ours" or "c=<k>"
  std::vector<ExperimentCell> cells;
};

struct HalfmoonsResult {
  std::vector<ExperimentRow> rows;  // ours first, then baselines
  NullDistribution null_dist;
  HalfmoonsConfig config;
  double elapsed_seconds = 0.0;
};

HalfmoonsResult run_halfmoons_experiment(const HalfmoonsConfig& config,
                                         const std::optional<std::filesystem::path>& cache_dir = {});

std::string halfmoons_table_text(const HalfmoonsResult& result);
std::string halfmoons_table_csv(const HalfmoonsResult& result);

// ---------------------------------------------------------------------------
// KDE over-concentration: the cube construction on which a bandwidth-sigma
// KDE data-copies at rate >= 1/2.

struct KdeExperimentConfig {
  long long n = 100;
  int d = 2;
  double lambda = 5.0;
  double gamma = 0.01;
  double sigma = 0.05;
  Kernel kernel = Kernel::uniform_ball;
  int seeds = 10;
  DetectionParams detection{5.0, 0.01, 0.1, 0.05, 200000, 0, 50, 2, 0};
  std::uint64_t seed = 1;
  int threads = 0;
};

struct KdeExperimentResult {
  double side = 0.0;  // D
  std::vector<double> cr_hats;
  KdeExperimentConfig config;
};

KdeExperimentResult run_kde_experiment(const KdeExperimentConfig& config);

// ---------------------------------------------------------------------------
// Lower-bound fixtures: covering probability and the exact copy rates of the
// adversarial pair of generators.

struct LowerBoundConfig {
  int kappa = 64;
  double lambda = 13.0;
  double epsilon = 1.0 / 3.0;
  double gamma = 0.5;
  int cover_seeds = 100;
  int grid_density = 512;
  std::uint64_t seed = 1;
};

struct LowerBoundResult {
  int covers_hits = 0;  // of cover_seeds
  double cr_a = 0.0;        // oracle on A_T(S) at (lambda(1+eps), gamma/(1+eps))
  double cr_a_expected = 0.0;  // lambda(1+eps)/24
  double cr_a_prime = 0.0;  // oracle on A_T'(S) at (lambda/(1+eps), gamma(1+eps))
  double density_ratio = 0.0;      // lambda(1+eps)/2
  double density_threshold = 0.0;  // lambda/(1+eps)
  LowerBoundConfig config;
};

LowerBoundResult run_lowerbound_experiment(const LowerBoundConfig& config);

}  // namespace datacopy
