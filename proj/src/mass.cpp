#include "datacopy/mass.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "datacopy/errors.hpp"
#include "datacopy/rng.hpp"

namespace datacopy {

namespace {

void check_tolerances(double delta, double epsilon, const char* where) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw ValidationError(std::string(where) + ": delta must be in (0, 1)");
  }
  if (!(epsilon > 0.0)) {
    throw ValidationError(std::string(where) + ": epsilon must be positive");
  }
}

}  // namespace

long long theoretical_b(int d, long long n, double delta, double epsilon) {
  if (d < 1) throw ValidationError("theoretical_b: d must be >= 1");
  if (n < 1) throw ValidationError("theoretical_b: n must be >= 1");
  check_tolerances(delta, epsilon, "theoretical_b");
  const double eps = std::min(epsilon, 1.0);
  const double v = 400.0 * (d + 2) * std::log(16.0 * static_cast<double>(n) / delta) / (eps * eps);
  return static_cast<long long>(std::ceil(v));
}

double ipow(double x, int k) {
  double result = 1.0;
  double base = x;
  for (int e = k; e > 0; e >>= 1) {
    if (e & 1) result *= base;
    if (e > 1) base *= base;
  }
  return result;
}

double est_mass_from_sorted(std::span<const double> sorted_dists, double r,
                            const RegularityParams& params) {
  const std::size_t n = sorted_dists.size();
  if (params.b < 1) throw ValidationError("est_mass: b must be >= 1");
  if (params.k < 1) throw ValidationError("est_mass: k must be >= 1");
  if (static_cast<std::size_t>(params.b) > n) {
    throw ValidationError("est_mass: insufficient training data for threshold b (b=" +
                          std::to_string(params.b) + ", |S|=" + std::to_string(n) + ")");
  }
  if (r < 0.0) throw ValidationError("est_mass: radius must be nonnegative");

  const double r_star = sorted_dists[params.b - 1];
  if (r_star > r) {
    const double scale = static_cast<double>(params.b) / static_cast<double>(n);
    return scale * ipow(r / r_star, params.k);
  }
  const auto count =
      std::upper_bound(sorted_dists.begin(), sorted_dists.end(), r) - sorted_dists.begin();
  return static_cast<double>(count) / static_cast<double>(n);
}

double est_mass(std::span<const double> x, double r, const PointSet& S,
                const RegularityParams& params) {
  const std::vector<double> dists = sorted_distances(S, x);
  return est_mass_from_sorted(dists, r, params);
}

long long estimate_k_threshold(int d, long long n, double delta, double epsilon) {
  if (d < 1) throw ValidationError("estimate_k_threshold: d must be >= 1");
  if (n < 1) throw ValidationError("estimate_k_threshold: n must be >= 1");
  check_tolerances(delta, epsilon, "estimate_k_threshold");
  const double v =
      64.0 * (d + 2) * std::log(16.0 * static_cast<double>(n) / delta) / (epsilon * epsilon);
  return static_cast<long long>(std::ceil(v));
}

namespace {

int estimate_k_at(const PointSet& S, const EstimatorConfig& cfg, std::size_t anchor) {
  const long long n = static_cast<long long>(S.size());
  const long long b = cfg.b_override ? *cfg.b_override
                                     : estimate_k_threshold(S.dim(), n, cfg.delta, cfg.epsilon);
  if (b < 1) throw ValidationError("estimate_k: threshold b must be >= 1");
  if (n < 2 * b) {
    throw ValidationError("estimate_k: need |S| >= 2b (b=" + std::to_string(b) +
                          ", |S|=" + std::to_string(n) + ")");
  }

  std::vector<double> dists(S.size());
  const auto x = S[anchor];
  for (std::size_t i = 0; i < S.size(); ++i) dists[i] = distance(S[i], x);

  std::nth_element(dists.begin(), dists.begin() + (b - 1), dists.end());
  const double s_star = dists[b - 1];
  std::nth_element(dists.begin() + b, dists.begin() + (2 * b - 1), dists.end());
  const double r_star = dists[2 * b - 1];

  if (s_star <= 0.0 || r_star == s_star) {
    throw ValidationError("estimate_k: degenerate radii; data has duplicates or insufficient spread");
  }
  const long long k_hat = std::llround(1.0 / std::log2(r_star / s_star));
  if (k_hat < 1) throw ValidationError("estimate_k: inconsistent regularity estimate");
  return static_cast<int>(k_hat);
}

}  // namespace

int estimate_k(const PointSet& S, const EstimatorConfig& cfg) {
  if (S.empty()) throw ValidationError("estimate_k: point set is empty");
  return estimate_k_at(S, cfg, 0);
}

int estimate_k(const PointSet& S, const EstimatorConfig& cfg, std::uint64_t anchor_seed) {
  if (S.empty()) throw ValidationError("estimate_k: point set is empty");
  RandomStream rng(anchor_seed);
  return estimate_k_at(S, cfg, rng.index(S.size()));
}

}  // namespace datacopy
