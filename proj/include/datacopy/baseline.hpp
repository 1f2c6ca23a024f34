#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "datacopy/geometry.hpp"

namespace datacopy {

struct BaselineParams {
  int c = 1;            // cluster count
  int max_iters = 100;  // Lloyd iteration budget
  std::uint64_t seed = 0;
  // Distances to the whole training set instead of the cluster's own points.
  bool global_s_distances = false;
};

struct ClusterStat {
  int cluster = 0;
  std::size_t n_p = 0;
  std::size_t n_q = 0;
  long long delta = 0;
  double z = 0.0;
  bool defined = false;  // false when either sample is empty in this cluster
};

struct BaselineReport {
  std::vector<ClusterStat> per_cluster;
  double min_z = 0.0;
  double p_value = 0.0;  // standard normal CDF of min_z
};

// Lloyd's iterations from seeded greedy farthest-point initialization until
// the assignment reaches a fixpoint or max_iters. Every cluster ends
// nonempty. Deterministic per seed.
std::pair<PointSet, std::vector<int>> cmeans(const PointSet& S, int c,
                                             const BaselineParams& params);

// Rank statistic: delta = #{(i, j) : p_dists[i] < q_dists[j]} and its normal
// approximation z = (delta - nP nQ / 2) / sqrt(nP nQ (nP + nQ + 1) / 12).
// Ties contribute nothing to delta.
std::pair<long long, double> zu_statistic(std::span<const double> p_dists,
                                          std::span<const double> q_dists);

// Three-sample test: cluster S, assign P and Q to nearest centroids, compare
// nearest-training-point distances per cluster, report the lowest z over the
// clusters holding both samples. Small delta means copying, so copying shows
// up as negative z and a small p-value.
BaselineReport baseline_test(const PointSet& S, const PointSet& P, const PointSet& Q,
                             const BaselineParams& params);

double standard_normal_cdf(double z);

}  // namespace datacopy
