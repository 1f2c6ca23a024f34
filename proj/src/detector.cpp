#include "datacopy/detector.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "datacopy/errors.hpp"
#include "datacopy/mass.hpp"
#include "datacopy/parallel.hpp"

namespace datacopy {

void DetectionParams::validate() const {
  if (!(lambda > 1.0)) throw ValidationError("DetectionParams: lambda must exceed 1");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("DetectionParams: gamma must be in (0, 1)");
  if (!(epsilon > 0.0)) throw ValidationError("DetectionParams: epsilon must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("DetectionParams: delta must be in (0, 1)");
  if (m < 1) throw ValidationError("DetectionParams: m must be >= 1");
  if (u_size < 0) throw ValidationError("DetectionParams: u_size must be >= 1 (or 0 for auto)");
  if (b < 1) throw ValidationError("DetectionParams: b must be >= 1");
  if (k < 0) throw ValidationError("DetectionParams: k must be >= 1 (or 0 for auto)");
}

long long DetectionParams::resolved_u() const {
  if (u_size > 0) return u_size;
  return static_cast<long long>(std::ceil(20.0 * std::log(1.0 / delta) / (epsilon * epsilon)));
}

long long theoretical_m(int d, long long n, double delta, double epsilon) {
  if (d < 1) throw ValidationError("theoretical_m: d must be >= 1");
  if (n < 1) throw ValidationError("theoretical_m: n must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("theoretical_m: delta must be in (0, 1)");
  if (!(epsilon > 0.0)) throw ValidationError("theoretical_m: epsilon must be positive");
  const double me = std::min(epsilon, 1.0);
  const double nn = static_cast<double>(n);
  const double eps_fac = epsilon * epsilon * me * me;
  const double inner = 98304.0 * nn * nn * (d + 2) / (delta * eps_fac);
  const double v = 2048.0 * nn * nn * (d + 2) * std::log(inner) / eps_fac;
  return static_cast<long long>(std::ceil(v));
}

namespace {

// Largest candidate radius with est <= gamma; used only to prune the T scan.
// The per-candidate exact check below is authoritative.
double gamma_radius_upper_bound(std::span<const double> sorted_s, const DetectionParams& params,
                                int k) {
  const std::size_t n = sorted_s.size();
  const double bn = static_cast<double>(params.b) / static_cast<double>(n);
  if (params.gamma < bn) {
    const double r_star = sorted_s[params.b - 1];
    return r_star * std::pow(params.gamma / bn, 1.0 / k);
  }
  const auto j_max = static_cast<long long>(std::floor(params.gamma * static_cast<double>(n)));
  if (j_max >= static_cast<long long>(n)) return std::numeric_limits<double>::infinity();
  return sorted_s[static_cast<std::size_t>(j_max)];
}

// Shared radius search over precomputed sorted training distances and the
// flat coordinates of T.
double copy_radius_core(std::span<const double> x, std::span<const double> sorted_s,
                        std::span<const double> t_data, std::size_t m, int dim,
                        const DetectionParams& params, int k,
                        std::vector<double>& scratch) {
  const RegularityParams reg{k, params.b};
  const double m_d = static_cast<double>(m);

  double r_up = gamma_radius_upper_bound(sorted_s, params, k);
  double r_up_sq = std::numeric_limits<double>::infinity();
  if (std::isfinite(r_up)) {
    r_up *= 1.0 + 1e-9;  // slack so boundary candidates reach the exact check
    r_up_sq = r_up * r_up;
  }

  scratch.clear();
  for (std::size_t z = 0; z < m; ++z) {
    const double* zp = t_data.data() + z * dim;
    double dsq = 0.0;
    for (int j = 0; j < dim; ++j) {
      const double d = x[j] - zp[j];
      dsq += d * d;
    }
    if (dsq <= r_up_sq) scratch.push_back(std::sqrt(dsq));
  }
  std::sort(scratch.begin(), scratch.end());

  // Walk candidates from the largest down; the first radius passing both
  // the gamma filter and the lambda condition is the maximum.
  std::size_t idx = scratch.size();
  while (idx > 0) {
    const double r = scratch[idx - 1];
    const double est = est_mass_from_sorted(sorted_s, r, reg);
    if (est <= params.gamma) {
      const double q_i = static_cast<double>(idx) / m_d;
      if (q_i >= params.lambda * est) return r;
    }
    // skip duplicates of r
    while (idx > 0 && scratch[idx - 1] == r) --idx;
  }
  // The zero radius remains: its estimated mass is zero unless b training
  // points coincide with x, and the empirical q-mass is always >= 0.
  return 0.0;
}

}  // namespace

double find_copy_radius(std::span<const double> x_i, const PointSet& S, const PointSet& T,
                        const DetectionParams& params) {
  params.validate();
  if (static_cast<long long>(S.size()) < params.b) {
    throw ValidationError("find_copy_radius: |S| < b");
  }
  if (S.dim() != T.dim() || static_cast<int>(x_i.size()) != S.dim()) {
    throw ValidationError("find_copy_radius: dimension mismatch");
  }
  int k = params.k;
  if (k == 0) k = estimate_k(S, EstimatorConfig{params.epsilon, params.delta, {}});
  const std::vector<double> sorted_s = sorted_distances(S, x_i);
  std::vector<double> scratch;
  return copy_radius_core(x_i, sorted_s, T.data(), T.size(), T.dim(), params, k, scratch);
}

DetectionReport detect(const PointSet& S, SamplerOracle& q, const DetectionParams& params,
                       int threads) {
  params.validate();
  const std::size_t n = S.size();
  if (n == 0) throw ValidationError("detect: training set is empty");
  if (static_cast<long long>(n) < params.b) {
    throw ValidationError("detect: |S| < b (" + std::to_string(n) + " < " +
                          std::to_string(params.b) + ")");
  }
  if (q.dim() != S.dim()) throw ValidationError("detect: sampler dimension differs from S");

  const auto t0 = std::chrono::steady_clock::now();

  int k = params.k;
  if (k == 0) k = estimate_k(S, EstimatorConfig{params.epsilon, params.delta, {}});

  // The sampler stream is consumed sequentially before any parallel work.
  q.reseed(params.seed);
  const PointSet T = q.draw(static_cast<std::size_t>(params.m));
  const long long u_count = params.resolved_u();
  const PointSet U = q.draw(static_cast<std::size_t>(u_count));

  DetectionReport report;
  report.regions.resize(n);

  const int dim = S.dim();
  parallel_for(n, threads, [&](std::size_t i) {
    thread_local std::vector<double> scratch;
    const auto x = S[i];
    const std::vector<double> sorted_s = sorted_distances(S, x);
    const double r = copy_radius_core(x, sorted_s, T.data(), T.size(), dim, params, k, scratch);
    report.regions[i] = CopyRegion{i, r};
  });

  // |V| = U-points inside the union of copy balls (closed; radius-zero
  // regions admit exact coincidences only).
  long long v_count = 0;
  for (std::size_t u = 0; u < U.size(); ++u) {
    const double* up = U.data().data() + u * dim;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = report.regions[i].radius;
      const double* xp = S.data().data() + i * dim;
      double dsq = 0.0;
      for (int j = 0; j < dim; ++j) {
        const double d = up[j] - xp[j];
        dsq += d * d;
      }
      if (dsq <= r * r * (1.0 + 1e-9) && std::sqrt(dsq) <= r) {
        ++v_count;
        break;
      }
    }
  }

  report.cr_hat = static_cast<double>(v_count) / static_cast<double>(U.size());
  report.m_used = params.m;
  report.u_used = u_count;
  report.v_count = v_count;
  report.k_used = k;
  report.params = params;
  report.seed = params.seed;
  report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace datacopy
