#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"
#include "pd/calibrate.hpp"
#include "pd/detect.hpp"
#include "pd/experiment.hpp"
#include "pd/threshold.hpp"

namespace pd {

// All reports use nlohmann::json's default map-backed object, so keys are
// emitted in sorted order; together with fixed indentation this makes equal
// reports byte-identical.

nlohmann::json to_report_json(const ThresholdConfig& config);
ThresholdConfig threshold_config_from_json(const nlohmann::json& doc);

// seed is attached when the detection consumed randomness (calibrated phi).
nlohmann::json to_report_json(const DetectionResult& result,
                              std::optional<std::uint64_t> seed = std::nullopt);

nlohmann::json to_report_json(const CalibrationResult& result);

// Summary only: per-run outcomes (which carry wall-clock noise) are exported
// separately as CSV so the JSON report is reproducible byte for byte.
nlohmann::json to_report_json(const ExperimentReport& report);

std::string canonical_dump(const nlohmann::json& doc);
void write_report(const nlohmann::json& doc, const std::filesystem::path& path);

std::string outcomes_csv(const ExperimentReport& report);
std::string samples_csv(const CalibrationResult& result);

}  // namespace pd
