#include "datacopy/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "datacopy/baseline.hpp"
#include "datacopy/errors.hpp"
#include "datacopy/parallel.hpp"
#include "datacopy/rng.hpp"

namespace datacopy {

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

HalfmoonsResult run_halfmoons_experiment(const HalfmoonsConfig& config,
                                         const std::optional<std::filesystem::path>& cache_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  HalfmoonsConfig cfg = config;
  if (cfg.quick) {
    cfg.calib_runs = std::min(cfg.calib_runs, 40);
    cfg.reps = std::min(cfg.reps, 3);
  }
  cfg.detection.validate();

  const auto p = std::make_shared<Halfmoons>(cfg.sigma);

  NullDistribution null_dist =
      cache_dir ? null_calibrate_cached(*cache_dir, *p, cfg.n, cfg.detection, cfg.calib_runs,
                                        derive_seed(cfg.seed, 1), cfg.threads)
                : null_calibrate(*p, cfg.n, cfg.detection, cfg.calib_runs,
                                 derive_seed(cfg.seed, 1), cfg.threads);

  HalfmoonsResult result;
  result.config = cfg;

  // Detector row: per cell, median p over repetitions against the shared
  // null distribution.
  ExperimentRow ours;
  ours.method = "ours";
  for (std::size_t cell = 0; cell < cfg.rhos.size(); ++cell) {
    const double rho = cfg.rhos[cell];
    ExperimentCell out;
    out.rho = rho;
    out.p_values.resize(cfg.reps);
    parallel_for(static_cast<std::size_t>(cfg.reps), cfg.threads, [&](std::size_t rep) {
      const std::uint64_t rs = derive_seed(cfg.seed, 1000 + cell * 100 + rep);
      const PointSet S = p->sample(cfg.n, derive_seed(rs, 1));
      std::unique_ptr<SamplerOracle> sampler;
      if (rho == 0.0) {
        sampler = std::make_unique<AnalyticSampler>(p, derive_seed(rs, 2));
      } else {
        sampler = make_copier_mixture(S, rho, cfg.copy_count, cfg.copy_noise, cfg.underfit_noise,
                                      p, derive_seed(rs, 2));
      }
      DetectionParams dp = cfg.detection;
      dp.seed = derive_seed(rs, 3);
      const DetectionReport rep_report = detect(S, *sampler, dp, /*threads=*/1);
      out.p_values[rep] = p_value(null_dist, rep_report.cr_hat);
    });
    out.median_p = median(out.p_values);
    out.significant = decide(out.median_p, cfg.alpha).significant;
    ours.cells.push_back(std::move(out));
  }
  result.rows.push_back(std::move(ours));

  // Baseline rows: all cluster counts share each repetition's S, P, Q.
  const double baseline_alpha = standard_normal_cdf(cfg.z_threshold);
  std::vector<ExperimentRow> baseline_rows(cfg.cluster_counts.size());
  for (std::size_t ci = 0; ci < cfg.cluster_counts.size(); ++ci) {
    baseline_rows[ci].method = "c=" + std::to_string(cfg.cluster_counts[ci]);
  }
  for (std::size_t cell = 0; cell < cfg.rhos.size(); ++cell) {
    const double rho = cfg.rhos[cell];
    std::vector<std::vector<double>> pvals(cfg.cluster_counts.size(),
                                           std::vector<double>(cfg.reps));
    parallel_for(static_cast<std::size_t>(cfg.reps), cfg.threads, [&](std::size_t rep) {
      const std::uint64_t rs = derive_seed(cfg.seed, 5000 + cell * 100 + rep);
      const PointSet S = p->sample(cfg.n, derive_seed(rs, 1));
      const PointSet P = p->sample(cfg.n, derive_seed(rs, 2));
      std::unique_ptr<SamplerOracle> sampler;
      if (rho == 0.0) {
        sampler = std::make_unique<AnalyticSampler>(p, derive_seed(rs, 3));
      } else {
        sampler = make_copier_mixture(S, rho, cfg.copy_count, cfg.copy_noise, cfg.underfit_noise,
                                      p, derive_seed(rs, 3));
      }
      const PointSet Q = sampler->draw(cfg.n);
      for (std::size_t ci = 0; ci < cfg.cluster_counts.size(); ++ci) {
        BaselineParams bp;
        bp.c = cfg.cluster_counts[ci];
        bp.seed = derive_seed(rs, 10 + ci);
        const BaselineReport br = baseline_test(S, P, Q, bp);
        pvals[ci][rep] = br.p_value;
      }
    });
    for (std::size_t ci = 0; ci < cfg.cluster_counts.size(); ++ci) {
      ExperimentCell out;
      out.rho = rho;
      out.p_values = pvals[ci];
      out.median_p = median(pvals[ci]);
      out.significant = out.median_p <= baseline_alpha;
      baseline_rows[ci].cells.push_back(std::move(out));
    }
  }
  for (auto& row : baseline_rows) result.rows.push_back(std::move(row));

  result.null_dist = std::move(null_dist);
  result.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

namespace {

std::string cell_header(double rho) {
  if (rho == 0.0) return "q=p";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "rho=%g", rho);
  return buf;
}

}  // namespace

std::string halfmoons_table_text(const HalfmoonsResult& result) {
  std::ostringstream os;
  char buf[64];
  os << "method   ";
  for (const auto& cell : result.rows.front().cells) {
    std::snprintf(buf, sizeof(buf), "%14s", cell_header(cell.rho).c_str());
    os << buf;
  }
  os << "\n";
  for (const auto& row : result.rows) {
    std::snprintf(buf, sizeof(buf), "%-9s", row.method.c_str());
    os << buf;
    for (const auto& cell : row.cells) {
      std::snprintf(buf, sizeof(buf), "%8.3f %-5s", cell.median_p,
                    cell.significant ? "yes" : "no");
      os << buf;
    }
    os << "\n";
  }
  return os.str();
}

std::string halfmoons_table_csv(const HalfmoonsResult& result) {
  std::ostringstream os;
  os << "method";
  for (const auto& cell : result.rows.front().cells) os << "," << cell_header(cell.rho);
  os << "\n";
  char buf[40];
  for (const auto& row : result.rows) {
    os << row.method;
    for (const auto& cell : row.cells) {
      std::snprintf(buf, sizeof(buf), ",%.6f;%s", cell.median_p,
                    cell.significant ? "yes" : "no");
      os << buf;
    }
    os << "\n";
  }
  return os.str();
}

KdeExperimentResult run_kde_experiment(const KdeExperimentConfig& config) {
  KdeExperimentConfig cfg = config;
  cfg.detection.lambda = cfg.lambda;
  cfg.detection.gamma = cfg.gamma;
  cfg.detection.validate();

  const CubeKdeFixture fixture =
      uniform_cube_kde_fixture(cfg.n, cfg.lambda, cfg.gamma, cfg.sigma, cfg.d, cfg.kernel);

  KdeExperimentResult result;
  result.side = fixture.side;
  result.config = cfg;
  result.cr_hats.resize(cfg.seeds);

  parallel_for(static_cast<std::size_t>(cfg.seeds), cfg.threads, [&](std::size_t s) {
    const std::uint64_t rs = derive_seed(cfg.seed, 100 + s);
    const PointSet S = fixture.pi->sample(static_cast<std::size_t>(cfg.n), derive_seed(rs, 1));
    auto sampler = kde_sampler(S, cfg.sigma, cfg.kernel, derive_seed(rs, 2));
    DetectionParams dp = cfg.detection;
    dp.seed = derive_seed(rs, 2);
    const DetectionReport rep = detect(S, *sampler, dp, /*threads=*/1);
    result.cr_hats[s] = rep.cr_hat;
  });
  return result;
}

LowerBoundResult run_lowerbound_experiment(const LowerBoundConfig& config) {
  LowerBoundResult result;
  result.config = config;
  const int kappa = config.kappa;
  if (kappa % 8 != 0) throw ValidationError("lower-bound experiment: kappa must be divisible by 8");

  const CircleGeometry geometry = CircleGeometry::axis_layout(kappa);
  const IndexSubset subset = IndexSubset::first_half(kappa);
  const auto p_t = circles_family(kappa, subset, geometry);

  // (a) covering frequency of S ~ p_T^kappa
  std::optional<PointSet> covering_s;
  for (int s = 0; s < config.cover_seeds; ++s) {
    const PointSet S = p_t->sample(static_cast<std::size_t>(kappa), derive_seed(config.seed, s));
    if (covers(S, subset, geometry)) {
      ++result.covers_hits;
      if (!covering_s) covering_s = S;
    }
  }
  if (!covering_s) {
    throw ValidationError("lower-bound experiment: no covering sample found");
  }

  // (b) exact copy rates of the adversarial pair on a covering sample
  const double lam_up = config.lambda * (1.0 + config.epsilon);
  const double lam_down = config.lambda / (1.0 + config.epsilon);
  const auto q_a = generative_A(*covering_s, subset, config.lambda, config.epsilon, geometry,
                                /*prime=*/false, derive_seed(config.seed, 9001));
  const auto q_a_prime = generative_A(*covering_s, subset, config.lambda, config.epsilon, geometry,
                                      /*prime=*/true, derive_seed(config.seed, 9002));
  result.cr_a = exact_cr_oracle(*q_a, *p_t, *covering_s, lam_up,
                                config.gamma / (1.0 + config.epsilon), config.grid_density);
  result.cr_a_expected = lam_up * (1.0 / 24.0);
  result.cr_a_prime = exact_cr_oracle(*q_a_prime, *p_t, *covering_s, lam_down,
                                      config.gamma * (1.0 + config.epsilon), config.grid_density);

  // (c) density-ratio inequality from the proof of the zero-rate direction
  result.density_ratio = lam_up / 2.0;
  result.density_threshold = lam_down;
  return result;
}

}  // namespace datacopy
