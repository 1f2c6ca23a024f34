// Command-line front end: detection, the three-sample baseline, null
// calibration, dimension estimation, synthetic data emission, and the
// experiment recipes.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "datacopy/baseline.hpp"
#include "datacopy/calibration.hpp"
#include "datacopy/csv.hpp"
#include "datacopy/detector.hpp"
#include "datacopy/distributions.hpp"
#include "datacopy/errors.hpp"
#include "datacopy/experiments.hpp"
#include "datacopy/mass.hpp"
#include "datacopy/report.hpp"
#include "datacopy/subprocess_sampler.hpp"

namespace dc = datacopy;
using nlohmann::json;

namespace {

// Distribution spec grammar: name[:key=value]*, e.g. "halfmoons:sigma=0.1",
// "circle", "square:side=2", "cube:side=1.5:d=3".
std::shared_ptr<const dc::AnalyticDistribution> make_distribution(const std::string& spec) {
  std::string name = spec;
  std::map<std::string, double> kv;
  if (const auto colon = spec.find(':'); colon != std::string::npos) {
    name = spec.substr(0, colon);
    std::string rest = spec.substr(colon + 1);
    std::istringstream is(rest);
    std::string item;
    while (std::getline(is, item, ':')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) {
        throw dc::ValidationError("distribution spec: expected key=value, got '" + item + "'");
      }
      kv[item.substr(0, eq)] = std::strtod(item.c_str() + eq + 1, nullptr);
    }
  }
  auto take = [&kv](const std::string& key, double fallback) {
    const auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    const double v = it->second;
    kv.erase(it);
    return v;
  };
  std::shared_ptr<const dc::AnalyticDistribution> dist;
  if (name == "halfmoons") {
    dist = std::make_shared<dc::Halfmoons>(take("sigma", 0.1));
  } else if (name == "circle") {
    dist = dc::unit_circle();
  } else if (name == "square") {
    dist = std::make_shared<dc::UniformCube>(take("side", 1.0), 2);
  } else if (name == "cube") {
    dist = std::make_shared<dc::UniformCube>(take("side", 1.0),
                                             static_cast<int>(take("d", 2.0)));
  } else {
    throw dc::ValidationError("unknown distribution '" + name +
                              "' (known: halfmoons, circle, square, cube)");
  }
  if (!kv.empty()) {
    throw dc::ValidationError("distribution spec: unknown key '" + kv.begin()->first + "'");
  }
  return dist;
}

struct SamplerSource {
  std::string dist_spec;
  std::string file;
  std::string command;
  int command_dim = 0;
  double timeout = 60.0;

  void add_flags(CLI::App* cmd) {
    auto* d = cmd->add_option("--sampler-dist", dist_spec, "built-in analytic distribution spec");
    auto* f = cmd->add_option("--sampler-file", file, "CSV of pre-drawn generated points");
    auto* c = cmd->add_option("--sampler-cmd", command, "child process speaking the line protocol");
    cmd->add_option("--sampler-dim", command_dim, "point dimension for --sampler-cmd");
    cmd->add_option("--sampler-timeout", timeout, "seconds per protocol batch")
        ->capture_default_str();
    d->excludes(f)->excludes(c);
    f->excludes(c);
  }

  std::unique_ptr<dc::SamplerOracle> build(std::uint64_t seed, json& echo) const {
    if (!dist_spec.empty()) {
      echo["sampler"] = json{{"kind", "dist"}, {"spec", dist_spec}};
      return std::make_unique<dc::AnalyticSampler>(make_distribution(dist_spec), seed);
    }
    if (!file.empty()) {
      echo["sampler"] = json{{"kind", "file"}, {"path", file}, {"digest", dc::file_digest(file)}};
      return std::make_unique<dc::PointSetSampler>(dc::read_points_csv(file));
    }
    if (!command.empty()) {
      if (command_dim < 1) {
        throw dc::ValidationError("--sampler-cmd requires --sampler-dim");
      }
      echo["sampler"] = json{{"kind", "command"}, {"command", command}, {"dim", command_dim}};
      return std::make_unique<dc::SubprocessSampler>(command, command_dim, timeout);
    }
    throw dc::ValidationError("one of --sampler-dist / --sampler-file / --sampler-cmd is required");
  }
};

void add_detection_flags(CLI::App* cmd, dc::DetectionParams& p) {
  cmd->add_option("--lambda", p.lambda, "overrepresentation factor, > 1")->capture_default_str();
  cmd->add_option("--gamma", p.gamma, "max copy-region mass, in (0,1)")->capture_default_str();
  cmd->add_option("--epsilon", p.epsilon, "tolerance")->capture_default_str();
  cmd->add_option("--delta", p.delta, "failure probability")->capture_default_str();
  cmd->add_option("--m", p.m, "generated sample size")->capture_default_str();
  cmd->add_option("--u-size", p.u_size, "rate-estimation sample size (0 = auto)")
      ->capture_default_str();
  cmd->add_option("--b", p.b, "mass-estimator threshold count")->capture_default_str();
  cmd->add_option("--k", p.k, "regularity constant (0 = estimate from S)")->capture_default_str();
  cmd->add_option("--seed", p.seed, "RNG seed")->capture_default_str();
}

double elapsed_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw dc::ParseError("cannot open " + path.string() + " for writing");
  out << text;
}

json halfmoons_result_json(const dc::HalfmoonsResult& result) {
  json rows = json::array();
  for (const auto& row : result.rows) {
    json cells = json::array();
    for (const auto& cell : row.cells) {
      cells.push_back(json{{"rho", cell.rho},
                           {"p_values", cell.p_values},
                           {"median_p", cell.median_p},
                           {"significant", cell.significant}});
    }
    rows.push_back(json{{"method", row.method}, {"cells", cells}});
  }
  return json{{"rows", rows},
              {"null_values", result.null_dist.values},
              {"reduced_precision", result.config.quick}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Point-wise data-copying detection for generative samplers"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI config file; flags override file values");

  int threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = DATACOPY_THREADS or hardware)")
      ->envname("DATACOPY_THREADS")
      ->capture_default_str();

  // ---- detect ----------------------------------------------------------
  auto* cmd_detect = app.add_subcommand("detect", "estimate the data-copy rate of a sampler");
  std::string train_path, out_path = "report.json";
  dc::DetectionParams det_params;
  SamplerSource source;
  cmd_detect->add_option("--train", train_path, "training point CSV")->required();
  source.add_flags(cmd_detect);
  add_detection_flags(cmd_detect, det_params);
  cmd_detect->add_option("-o,--output", out_path, "report path")->capture_default_str();

  // ---- baseline --------------------------------------------------------
  auto* cmd_baseline = app.add_subcommand("baseline", "three-sample rank test with c-means regions");
  std::string bl_train, bl_test, bl_generated, bl_out = "baseline.json";
  dc::BaselineParams bl_params;
  cmd_baseline->add_option("--train", bl_train, "training point CSV")->required();
  cmd_baseline->add_option("--test", bl_test, "held-out sample CSV (P)")->required();
  cmd_baseline->add_option("--generated", bl_generated, "generated sample CSV (Q)")->required();
  cmd_baseline->add_option("--c", bl_params.c, "cluster count")->capture_default_str();
  cmd_baseline->add_option("--max-iters", bl_params.max_iters)->capture_default_str();
  cmd_baseline->add_option("--seed", bl_params.seed)->capture_default_str();
  cmd_baseline->add_flag("--global-s", bl_params.global_s_distances,
                         "distances against all of S instead of the cluster's points");
  cmd_baseline->add_option("-o,--output", bl_out)->capture_default_str();

  // ---- calibrate -------------------------------------------------------
  auto* cmd_calibrate = app.add_subcommand("calibrate", "null distribution of cr_hat under q = p");
  std::string cal_dist = "halfmoons:sigma=0.1", cal_out = "null.json", cal_cache;
  long long cal_n = 2000;
  int cal_runs = 200;
  std::uint64_t cal_seed = 1;
  dc::DetectionParams cal_params;
  cmd_calibrate->add_option("--dist", cal_dist, "data distribution spec")->capture_default_str();
  cmd_calibrate->add_option("--n", cal_n, "training set size per run")->capture_default_str();
  cmd_calibrate->add_option("--runs", cal_runs)->capture_default_str();
  cmd_calibrate->add_option("--calib-seed", cal_seed)->capture_default_str();
  cmd_calibrate->add_option("--cache-dir", cal_cache, "reuse cached null distributions");
  add_detection_flags(cmd_calibrate, cal_params);
  cmd_calibrate->add_option("-o,--output", cal_out)->capture_default_str();

  // ---- estimate-k ------------------------------------------------------
  auto* cmd_estk = app.add_subcommand("estimate-k", "regularity constant from neighbor radii");
  std::string estk_train;
  dc::EstimatorConfig estk_cfg;
  long long estk_b_override = 0;
  std::uint64_t estk_anchor_seed = 0;
  bool estk_random_anchor = false;
  cmd_estk->add_option("--train", estk_train)->required();
  cmd_estk->add_option("--epsilon", estk_cfg.epsilon)->capture_default_str();
  cmd_estk->add_option("--delta", estk_cfg.delta)->capture_default_str();
  cmd_estk->add_option("--b-override", estk_b_override, "explicit threshold count");
  cmd_estk->add_flag("--random-anchor", estk_random_anchor, "pick the anchor point at random");
  cmd_estk->add_option("--anchor-seed", estk_anchor_seed)->capture_default_str();

  // ---- sample ----------------------------------------------------------
  auto* cmd_sample = app.add_subcommand("sample", "emit synthetic points as CSV");
  std::string smp_dist = "halfmoons:sigma=0.1", smp_out = "points.csv";
  long long smp_n = 1000;
  std::uint64_t smp_seed = 1;
  cmd_sample->add_option("--dist", smp_dist)->capture_default_str();
  cmd_sample->add_option("--n", smp_n)->capture_default_str();
  cmd_sample->add_option("--seed", smp_seed)->capture_default_str();
  cmd_sample->add_option("-o,--output", smp_out)->capture_default_str();

  // ---- experiment-halfmoons ---------------------------------------------
  auto* cmd_hm = app.add_subcommand("experiment-halfmoons",
                                    "detector vs baseline over copier mixtures");
  dc::HalfmoonsConfig hm_cfg;
  std::string hm_prefix = "halfmoons_experiment", hm_cache;
  cmd_hm->add_option("--n", hm_cfg.n)->capture_default_str();
  cmd_hm->add_option("--reps", hm_cfg.reps)->capture_default_str();
  cmd_hm->add_option("--calib-runs", hm_cfg.calib_runs)->capture_default_str();
  cmd_hm->add_option("--alpha", hm_cfg.alpha)->capture_default_str();
  cmd_hm->add_option("--z-threshold", hm_cfg.z_threshold)->capture_default_str();
  cmd_hm->add_option("--master-seed", hm_cfg.seed)->capture_default_str();
  cmd_hm->add_flag("--quick", hm_cfg.quick, "reduced runs; same schema, reduced-precision flag");
  cmd_hm->add_option("--cache-dir", hm_cache, "null distribution cache directory");
  add_detection_flags(cmd_hm, hm_cfg.detection);
  cmd_hm->add_option("--out-prefix", hm_prefix, "writes <prefix>.json/.csv/.txt")
      ->capture_default_str();

  // ---- experiment-kde ----------------------------------------------------
  auto* cmd_kde = app.add_subcommand("experiment-kde",
                                     "KDE over-concentration on the cube construction");
  dc::KdeExperimentConfig kde_cfg;
  std::string kde_out = "kde_experiment.json";
  cmd_kde->add_option("--n", kde_cfg.n)->capture_default_str();
  cmd_kde->add_option("--d", kde_cfg.d)->capture_default_str();
  cmd_kde->add_option("--lambda", kde_cfg.lambda)->capture_default_str();
  cmd_kde->add_option("--gamma", kde_cfg.gamma)->capture_default_str();
  cmd_kde->add_option("--sigma", kde_cfg.sigma)->capture_default_str();
  cmd_kde->add_option("--seeds", kde_cfg.seeds)->capture_default_str();
  cmd_kde->add_option("--master-seed", kde_cfg.seed)->capture_default_str();
  cmd_kde->add_option("--m", kde_cfg.detection.m)->capture_default_str();
  cmd_kde->add_option("--b", kde_cfg.detection.b)->capture_default_str();
  cmd_kde->add_option("--k", kde_cfg.detection.k)->capture_default_str();
  cmd_kde->add_option("-o,--output", kde_out)->capture_default_str();

  // ---- experiment-lowerbound ---------------------------------------------
  auto* cmd_lb = app.add_subcommand("experiment-lowerbound",
                                    "circle-family fixtures and exact oracle rates");
  dc::LowerBoundConfig lb_cfg;
  std::string lb_out = "lowerbound_experiment.json";
  cmd_lb->add_option("--kappa", lb_cfg.kappa)->capture_default_str();
  cmd_lb->add_option("--gamma", lb_cfg.gamma)->capture_default_str();
  cmd_lb->add_option("--cover-seeds", lb_cfg.cover_seeds)->capture_default_str();
  cmd_lb->add_option("--grid", lb_cfg.grid_density)->capture_default_str();
  cmd_lb->add_option("--master-seed", lb_cfg.seed)->capture_default_str();
  cmd_lb->add_option("-o,--output", lb_out)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
        e.get_name() == "CallForVersion") {
      return app.exit(e);
    }
    std::cerr << "parameter error: " << e.what() << "\n";
    return 4;
  }

  try {
    const auto t0 = std::chrono::steady_clock::now();

    if (cmd_detect->parsed()) {
      const dc::PointSet S = dc::read_points_csv(train_path);
      json config{{"train", train_path},
                  {"train_digest", dc::file_digest(train_path)},
                  {"params", dc::params_to_json(det_params)},
                  {"threads", threads}};
      auto sampler = source.build(det_params.seed, config);
      const dc::DetectionReport report = dc::detect(S, *sampler, det_params, threads);
      long n_nonzero = 0;
      for (const auto& r : report.regions) n_nonzero += r.radius > 0.0;
      dc::write_json(out_path, dc::make_report_document("detect", config,
                                                        dc::report_to_json(report),
                                                        elapsed_since(t0)));
      std::printf("cr_hat=%.6g regions=%zu nonzero_radii=%ld v=%lld u=%lld k=%d\n",
                  report.cr_hat, report.regions.size(), n_nonzero, report.v_count,
                  report.u_used, report.k_used);
      return 0;
    }

    if (cmd_baseline->parsed()) {
      const dc::PointSet S = dc::read_points_csv(bl_train);
      const dc::PointSet P = dc::read_points_csv(bl_test);
      const dc::PointSet Q = dc::read_points_csv(bl_generated);
      const dc::BaselineReport report = dc::baseline_test(S, P, Q, bl_params);
      json config{{"train", bl_train},     {"test", bl_test}, {"generated", bl_generated},
                  {"c", bl_params.c},      {"seed", bl_params.seed},
                  {"global_s", bl_params.global_s_distances}};
      dc::write_json(bl_out, dc::make_report_document("baseline", config,
                                                      dc::baseline_to_json(report),
                                                      elapsed_since(t0)));
      std::printf("min_z=%.4f p_value=%.6f\n", report.min_z, report.p_value);
      return 0;
    }

    if (cmd_calibrate->parsed()) {
      const auto dist = make_distribution(cal_dist);
      dc::NullDistribution null_dist;
      if (!cal_cache.empty()) {
        null_dist = dc::null_calibrate_cached(cal_cache, *dist, cal_n, cal_params, cal_runs,
                                              cal_seed, threads);
      } else {
        null_dist = dc::null_calibrate(*dist, cal_n, cal_params, cal_runs, cal_seed, threads);
      }
      json config{{"dist", cal_dist},
                  {"n", cal_n},
                  {"runs", cal_runs},
                  {"calib_seed", cal_seed},
                  {"params", dc::params_to_json(cal_params)}};
      dc::write_json(cal_out,
                     dc::make_report_document("calibrate", config,
                                              json{{"values", null_dist.values}},
                                              elapsed_since(t0)));
      double mx = 0.0;
      for (double v : null_dist.values) mx = std::max(mx, v);
      std::printf("runs=%zu max_null=%.6g\n", null_dist.values.size(), mx);
      return 0;
    }

    if (cmd_estk->parsed()) {
      const dc::PointSet S = dc::read_points_csv(estk_train);
      if (estk_b_override > 0) estk_cfg.b_override = estk_b_override;
      const int k = estk_random_anchor ? dc::estimate_k(S, estk_cfg, estk_anchor_seed)
                                       : dc::estimate_k(S, estk_cfg);
      std::printf("k=%d\n", k);
      return 0;
    }

    if (cmd_sample->parsed()) {
      const auto dist = make_distribution(smp_dist);
      dc::write_points_csv(smp_out, dist->sample(static_cast<std::size_t>(smp_n), smp_seed));
      std::printf("wrote %lld points to %s\n", smp_n, smp_out.c_str());
      return 0;
    }

    if (cmd_hm->parsed()) {
      hm_cfg.threads = threads;
      std::optional<std::filesystem::path> cache;
      if (!hm_cache.empty()) cache = hm_cache;
      const dc::HalfmoonsResult result = dc::run_halfmoons_experiment(hm_cfg, cache);
      const std::string text = dc::halfmoons_table_text(result);
      std::fputs(text.c_str(), stdout);
      json config{{"n", hm_cfg.n},
                  {"reps", hm_cfg.reps},
                  {"calib_runs", hm_cfg.calib_runs},
                  {"alpha", hm_cfg.alpha},
                  {"z_threshold", hm_cfg.z_threshold},
                  {"master_seed", hm_cfg.seed},
                  {"quick", hm_cfg.quick},
                  {"params", dc::params_to_json(hm_cfg.detection)}};
      dc::write_json(hm_prefix + ".json",
                     dc::make_report_document("experiment-halfmoons", config,
                                              halfmoons_result_json(result), elapsed_since(t0)));
      write_text(hm_prefix + ".csv", dc::halfmoons_table_csv(result));
      write_text(hm_prefix + ".txt", text);
      return 0;
    }

    if (cmd_kde->parsed()) {
      kde_cfg.threads = threads;
      const dc::KdeExperimentResult result = dc::run_kde_experiment(kde_cfg);
      int hits = 0;
      for (double cr : result.cr_hats) hits += cr >= 0.35;
      json config{{"n", kde_cfg.n},       {"d", kde_cfg.d},           {"lambda", kde_cfg.lambda},
                  {"gamma", kde_cfg.gamma}, {"sigma", kde_cfg.sigma}, {"seeds", kde_cfg.seeds},
                  {"master_seed", kde_cfg.seed}};
      dc::write_json(kde_out, dc::make_report_document(
                                  "experiment-kde", config,
                                  json{{"side", result.side}, {"cr_hats", result.cr_hats}},
                                  elapsed_since(t0)));
      std::printf("D=%.6g cr_hats_above_0.35=%d/%d\n", result.side, hits, kde_cfg.seeds);
      return 0;
    }

    if (cmd_lb->parsed()) {
      const dc::LowerBoundResult result = dc::run_lowerbound_experiment(lb_cfg);
      json config{{"kappa", lb_cfg.kappa},
                  {"gamma", lb_cfg.gamma},
                  {"cover_seeds", lb_cfg.cover_seeds},
                  {"grid", lb_cfg.grid_density},
                  {"master_seed", lb_cfg.seed}};
      dc::write_json(lb_out,
                     dc::make_report_document(
                         "experiment-lowerbound", config,
                         json{{"covers_hits", result.covers_hits},
                              {"cr_a", result.cr_a},
                              {"cr_a_expected", result.cr_a_expected},
                              {"cr_a_prime", result.cr_a_prime},
                              {"density_ratio", result.density_ratio},
                              {"density_threshold", result.density_threshold}},
                         elapsed_since(t0)));
      std::printf("covers=%d/%d cr_a=%.12g (expected %.12g) cr_a_prime=%.12g ratio=%.6g<%.6g\n",
                  result.covers_hits, lb_cfg.cover_seeds, result.cr_a, result.cr_a_expected,
                  result.cr_a_prime, result.density_ratio, result.density_threshold);
      return 0;
    }

    std::cerr << "no subcommand\n";
    return 4;
  } catch (const dc::ProtocolError& e) {
    std::cerr << "sampler protocol error: " << e.what() << "\n";
    return 3;
  } catch (const dc::ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const dc::ValidationError& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
