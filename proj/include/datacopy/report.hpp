#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "datacopy/baseline.hpp"
#include "datacopy/calibration.hpp"
#include "datacopy/detector.hpp"

namespace datacopy {

inline constexpr const char* kToolName = "datacopy";
inline constexpr const char* kToolVersion = "0.1.0";

nlohmann::json params_to_json(const DetectionParams& p);
DetectionParams params_from_json(const nlohmann::json& j);

// Timing lives under the separate "timing" key so the rest of the document
// is reproducible byte for byte from seed and inputs.
nlohmann::json report_to_json(const DetectionReport& r);
nlohmann::json baseline_to_json(const BaselineReport& r);

// Envelope: tool id/version, command, config echo, results, timing.
nlohmann::json make_report_document(const std::string& command, nlohmann::json config,
                                    nlohmann::json results, double elapsed_seconds);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace datacopy
