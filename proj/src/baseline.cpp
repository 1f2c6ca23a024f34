#include "datacopy/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "datacopy/errors.hpp"
#include "datacopy/rng.hpp"

namespace datacopy {

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

namespace {

std::size_t nearest_index(const PointSet& centroids, std::span<const double> p) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < centroids.size(); ++i) {
    const double d = squared_distance(centroids[i], p);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace

std::pair<PointSet, std::vector<int>> cmeans(const PointSet& S, int c,
                                             const BaselineParams& params) {
  const std::size_t n = S.size();
  if (c < 1) throw ValidationError("cmeans: c must be >= 1");
  if (static_cast<std::size_t>(c) > n) {
    throw ValidationError("cmeans: c exceeds |S| (" + std::to_string(c) + " > " +
                          std::to_string(n) + ")");
  }
  const int dim = S.dim();

  // Greedy farthest-point init from a seeded start.
  RandomStream rng(params.seed);
  std::vector<std::size_t> centers{rng.index(n)};
  std::vector<double> min_dist(n, std::numeric_limits<double>::infinity());
  while (static_cast<int>(centers.size()) < c) {
    const auto latest = S[centers.back()];
    std::size_t far = 0;
    double far_d = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      min_dist[i] = std::min(min_dist[i], squared_distance(S[i], latest));
      if (min_dist[i] > far_d) {
        far_d = min_dist[i];
        far = i;
      }
    }
    centers.push_back(far);
  }

  PointSet centroids(dim);
  for (std::size_t idx : centers) centroids.push_back(S[idx]);

  std::vector<int> assignment(n, -1);
  std::vector<double> sums(static_cast<std::size_t>(c) * dim);
  std::vector<std::size_t> counts(c);

  for (int iter = 0; iter < params.max_iters; ++iter) {
    bool changed = false;
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const int a = static_cast<int>(nearest_index(centroids, S[i]));
      if (a != assignment[i]) {
        assignment[i] = a;
        changed = true;
      }
      ++counts[a];
    }
    // Re-home the farthest point of any multi-point cluster into an emptied
    // one, keeping every cluster nonempty.
    for (int cl = 0; cl < c; ++cl) {
      if (counts[cl] > 0) continue;
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[assignment[i]] <= 1) continue;
        const double d = squared_distance(S[i], centroids[assignment[i]]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      --counts[assignment[far]];
      assignment[far] = cl;
      ++counts[cl];
      changed = true;
    }
    if (!changed && iter > 0) break;

    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto p = S[i];
      double* dst = sums.data() + static_cast<std::size_t>(assignment[i]) * dim;
      for (int j = 0; j < dim; ++j) dst[j] += p[j];
    }
    for (int cl = 0; cl < c; ++cl) {
      double* dst = centroids.mutable_data().data() + static_cast<std::size_t>(cl) * dim;
      const double* src = sums.data() + static_cast<std::size_t>(cl) * dim;
      for (int j = 0; j < dim; ++j) dst[j] = src[j] / static_cast<double>(counts[cl]);
    }
  }
  return {std::move(centroids), std::move(assignment)};
}

std::pair<long long, double> zu_statistic(std::span<const double> p_dists,
                                          std::span<const double> q_dists) {
  if (p_dists.empty() || q_dists.empty()) {
    throw ValidationError("zu_statistic: both distance lists must be nonempty");
  }
  std::vector<double> q_sorted(q_dists.begin(), q_dists.end());
  std::sort(q_sorted.begin(), q_sorted.end());

  long long delta = 0;
  for (double pd : p_dists) {
    // strict: count q-values greater than pd; ties contribute nothing
    delta += q_sorted.end() - std::upper_bound(q_sorted.begin(), q_sorted.end(), pd);
  }
  const double n_p = static_cast<double>(p_dists.size());
  const double n_q = static_cast<double>(q_dists.size());
  const double z =
      (static_cast<double>(delta) - n_p * n_q / 2.0) / std::sqrt(n_p * n_q * (n_p + n_q + 1.0) / 12.0);
  return {delta, z};
}

BaselineReport baseline_test(const PointSet& S, const PointSet& P, const PointSet& Q,
                             const BaselineParams& params) {
  if (S.dim() != P.dim() || S.dim() != Q.dim()) {
    throw ValidationError("baseline_test: dimension mismatch");
  }
  auto [centroids, assignment] = cmeans(S, params.c, params);
  const int c = params.c;

  // Cluster membership of S, then nearest-training distances per cluster.
  std::vector<std::vector<std::size_t>> cluster_points(c);
  for (std::size_t i = 0; i < S.size(); ++i) {
    cluster_points[assignment[i]].push_back(i);
  }

  auto nearest_training = [&](std::span<const double> y, int cl) {
    double best = std::numeric_limits<double>::infinity();
    if (params.global_s_distances) {
      for (std::size_t i = 0; i < S.size(); ++i) best = std::min(best, squared_distance(S[i], y));
    } else {
      for (std::size_t i : cluster_points[cl]) best = std::min(best, squared_distance(S[i], y));
    }
    return std::sqrt(best);
  };

  std::vector<std::vector<double>> p_dists(c), q_dists(c);
  for (std::size_t i = 0; i < P.size(); ++i) {
    const int cl = static_cast<int>(nearest_index(centroids, P[i]));
    p_dists[cl].push_back(nearest_training(P[i], cl));
  }
  for (std::size_t i = 0; i < Q.size(); ++i) {
    const int cl = static_cast<int>(nearest_index(centroids, Q[i]));
    q_dists[cl].push_back(nearest_training(Q[i], cl));
  }

  BaselineReport report;
  report.min_z = std::numeric_limits<double>::infinity();
  bool any_defined = false;
  for (int cl = 0; cl < c; ++cl) {
    ClusterStat stat;
    stat.cluster = cl;
    stat.n_p = p_dists[cl].size();
    stat.n_q = q_dists[cl].size();
    if (!p_dists[cl].empty() && !q_dists[cl].empty()) {
      auto [delta, z] = zu_statistic(p_dists[cl], q_dists[cl]);
      stat.delta = delta;
      stat.z = z;
      stat.defined = true;
      any_defined = true;
      report.min_z = std::min(report.min_z, z);
    }
    report.per_cluster.push_back(stat);
  }
  if (!any_defined) {
    throw ValidationError("baseline_test: all clusters degenerate (no paired samples)");
  }
  report.p_value = standard_normal_cdf(report.min_z);
  return report;
}

}  // namespace datacopy
