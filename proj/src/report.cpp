#include "datacopy/report.hpp"

#include <fstream>

#include "datacopy/errors.hpp"

namespace datacopy {

using nlohmann::json;

json params_to_json(const DetectionParams& p) {
  return json{{"lambda", p.lambda}, {"gamma", p.gamma},   {"epsilon", p.epsilon},
              {"delta", p.delta},   {"m", p.m},           {"u_size", p.u_size},
              {"b", p.b},           {"k", p.k},           {"seed", p.seed}};
}

DetectionParams params_from_json(const json& j) {
  DetectionParams p;
  p.lambda = j.value("lambda", p.lambda);
  p.gamma = j.value("gamma", p.gamma);
  p.epsilon = j.value("epsilon", p.epsilon);
  p.delta = j.value("delta", p.delta);
  p.m = j.value("m", p.m);
  p.u_size = j.value("u_size", p.u_size);
  p.b = j.value("b", p.b);
  p.k = j.value("k", p.k);
  p.seed = j.value("seed", p.seed);
  return p;
}

json report_to_json(const DetectionReport& r) {
  json regions = json::array();
  for (const CopyRegion& cr : r.regions) {
    regions.push_back(json::array({cr.train_index, cr.radius}));
  }
  return json{{"cr_hat", r.cr_hat},   {"v_count", r.v_count}, {"u_used", r.u_used},
              {"m_used", r.m_used},   {"k_used", r.k_used},   {"seed", r.seed},
              {"params", params_to_json(r.params)},           {"regions", regions}};
}

json baseline_to_json(const BaselineReport& r) {
  json clusters = json::array();
  for (const ClusterStat& c : r.per_cluster) {
    clusters.push_back(json{{"cluster", c.cluster},
                            {"n_p", c.n_p},
                            {"n_q", c.n_q},
                            {"delta", c.delta},
                            {"z", c.z},
                            {"defined", c.defined}});
  }
  return json{{"per_cluster", clusters}, {"min_z", r.min_z}, {"p_value", r.p_value}};
}

json make_report_document(const std::string& command, json config, json results,
                          double elapsed_seconds) {
  return json{{"tool", json{{"name", kToolName}, {"version", kToolVersion}}},
              {"command", command},
              {"config", std::move(config)},
              {"results", std::move(results)},
              {"timing", json{{"elapsed_seconds", elapsed_seconds}}}};
}

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path.string() + " for writing");
  out << doc.dump(2) << "\n";
}

}  // namespace datacopy
