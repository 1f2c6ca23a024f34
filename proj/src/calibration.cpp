#include "datacopy/calibration.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "datacopy/errors.hpp"
#include "datacopy/parallel.hpp"
#include "datacopy/rng.hpp"

namespace datacopy {

NullDistribution null_calibrate(const AnalyticDistribution& p, std::size_t n,
                                const DetectionParams& params, int runs, std::uint64_t seed,
                                int threads) {
  if (runs < 1) throw ValidationError("null_calibrate: runs must be >= 1");
  params.validate();

  NullDistribution null_dist;
  null_dist.seed = seed;
  null_dist.values.resize(runs);

  std::shared_ptr<const AnalyticDistribution> p_ref(&p, [](const AnalyticDistribution*) {});
  parallel_for(static_cast<std::size_t>(runs), threads, [&](std::size_t run) {
    const std::uint64_t run_seed = derive_seed(seed, run);
    try {
      const PointSet S = p.sample(n, derive_seed(run_seed, 1));
      AnalyticSampler sampler(p_ref, derive_seed(run_seed, 2));
      DetectionParams run_params = params;
      run_params.seed = derive_seed(run_seed, 2);
      const DetectionReport rep = detect(S, sampler, run_params, /*threads=*/1);
      null_dist.values[run] = rep.cr_hat;
    } catch (const std::exception& e) {
      throw ValidationError("null_calibrate: run " + std::to_string(run) +
                            " failed: " + e.what());
    }
  });
  return null_dist;
}

double p_value(const NullDistribution& null_dist, double observed, bool strict) {
  if (null_dist.values.empty()) throw ValidationError("p_value: null distribution is empty");
  std::size_t count = 0;
  for (double v : null_dist.values) {
    if (strict ? (v > observed) : (v >= observed)) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(null_dist.values.size());
}

SignificanceDecision decide(double p, double alpha) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("decide: p-value must be in [0, 1]");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("decide: alpha must be in [0, 1]");
  return SignificanceDecision{p, alpha, p <= alpha};
}

namespace {

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string params_fingerprint(const DetectionParams& p) {
  char buf[320];
  std::snprintf(buf, sizeof(buf),
                "lambda=%.17g;gamma=%.17g;eps=%.17g;delta=%.17g;m=%lld;u=%lld;b=%d;k=%d",
                p.lambda, p.gamma, p.epsilon, p.delta, p.m, p.u_size, p.b, p.k);
  return buf;
}

}  // namespace

std::string null_cache_key(const std::string& dist_id, std::size_t n,
                           const DetectionParams& params, int runs, std::uint64_t seed) {
  std::ostringstream os;
  os << dist_id << "|n=" << n << "|" << params_fingerprint(params) << "|runs=" << runs
     << "|seed=" << seed;
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, fnv1a64(os.str()));
  return buf;
}

void save_null_csv(const std::filesystem::path& path, const NullDistribution& null_dist,
                   const std::string& key) {
  std::ofstream out(path);
  if (!out) throw ParseError("save_null_csv: cannot open " + path.string());
  out << "# null-distribution-cache," << key << "," << null_dist.seed << ","
      << null_dist.values.size() << "\n";
  char buf[40];
  for (double v : null_dist.values) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf << "\n";
  }
}

std::optional<NullDistribution> load_null_csv(const std::filesystem::path& path,
                                              const std::string& key) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string header;
  if (!std::getline(in, header)) return std::nullopt;
  std::istringstream hs(header);
  std::string tag, file_key, seed_str, count_str;
  if (!std::getline(hs, tag, ',') || tag != "# null-distribution-cache") return std::nullopt;
  if (!std::getline(hs, file_key, ',') || file_key != key) return std::nullopt;
  if (!std::getline(hs, seed_str, ',') || !std::getline(hs, count_str, ',')) return std::nullopt;

  NullDistribution null_dist;
  null_dist.seed = std::strtoull(seed_str.c_str(), nullptr, 10);
  const std::size_t expect = std::strtoull(count_str.c_str(), nullptr, 10);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    null_dist.values.push_back(std::strtod(line.c_str(), nullptr));
  }
  if (null_dist.values.size() != expect) return std::nullopt;
  return null_dist;
}

NullDistribution null_calibrate_cached(const std::filesystem::path& cache_dir,
                                       const AnalyticDistribution& p, std::size_t n,
                                       const DetectionParams& params, int runs,
                                       std::uint64_t seed, int threads) {
  const std::string key = null_cache_key(p.id(), n, params, runs, seed);
  const std::filesystem::path path = cache_dir / ("null_" + key + ".csv");
  if (auto cached = load_null_csv(path, key)) return *cached;
  NullDistribution fresh = null_calibrate(p, n, params, runs, seed, threads);
  std::filesystem::create_directories(cache_dir);
  save_null_csv(path, fresh, key);
  return fresh;
}

}  // namespace datacopy
