#include "pd/report_json.hpp"

#include <charconv>
#include <sstream>

#include "pd/io_util.hpp"

namespace pd {

nlohmann::json to_report_json(const ThresholdConfig& config) {
  return {{"theta", config.theta},
          {"alpha0", config.alpha0},
          {"p_c", config.p_c},
          {"p_out", config.p_out},
          {"p_im", config.p_im}};
}

ThresholdConfig threshold_config_from_json(const nlohmann::json& doc) {
  ThresholdConfig config;
  config.theta = doc.at("theta").get<double>();
  config.alpha0 = doc.at("alpha0").get<double>();
  config.p_c = doc.at("p_c").get<double>();
  config.p_out = doc.at("p_out").get<double>();
  config.p_im = doc.at("p_im").get<double>();
  return config;
}

nlohmann::json to_report_json(const DetectionResult& result,
                              std::optional<std::uint64_t> seed) {
  nlohmann::json doc{{"detected", result.detected},
                     {"phi_used", result.phi_used},
                     {"theta_used", result.theta_used},
                     {"elapsed_ms", result.elapsed_ms},
                     {"width", result.width},
                     {"height", result.height}};
  if (result.witness) {
    doc["witness"] = {{"size", result.witness->size},
                      {"bbox",
                       {{"min_row", result.witness->min_row},
                        {"min_col", result.witness->min_col},
                        {"max_row", result.witness->max_row},
                        {"max_col", result.witness->max_col}}}};
  }
  if (seed) doc["seed"] = *seed;
  return doc;
}

nlohmann::json to_report_json(const CalibrationResult& result) {
  return {{"width", result.width},
          {"height", result.height},
          {"model", result.model},
          {"theta", result.theta},
          {"alpha", result.alpha},
          {"replicates", result.replicates},
          {"seed", result.seed},
          {"margin", result.margin},
          {"samples", result.samples},
          {"phi", result.phi}};
}

nlohmann::json to_report_json(const ExperimentReport& report) {
  return {{"runs", report.runs},
          {"detections", report.detections},
          {"rate", report.rate},
          {"wilson_ci", {{"lo", report.ci.lo}, {"hi", report.ci.hi}}},
          {"theta", report.theta},
          {"phi", report.phi},
          {"model", report.model},
          {"truth", report.truth},
          {"seed", report.seed}};
}

std::string canonical_dump(const nlohmann::json& doc) {
  return doc.dump(2) + "\n";
}

void write_report(const nlohmann::json& doc, const std::filesystem::path& path) {
  detail::atomic_write_file(path, canonical_dump(doc));
}

std::string outcomes_csv(const ExperimentReport& report) {
  std::string out = "run_index,detected,max_cluster,elapsed_ms\n";
  char buf[64];
  for (const auto& run : report.outcomes) {
    out += std::to_string(run.run_index);
    out += run.detected ? ",1," : ",0,";
    out += std::to_string(run.max_cluster);
    out.push_back(',');
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, run.elapsed_ms);
    out.append(buf, ec == std::errc() ? ptr : buf);
    out.push_back('\n');
  }
  return out;
}

std::string samples_csv(const CalibrationResult& result) {
  std::string out = "max_cluster\n";
  for (int s : result.samples) {
    out += std::to_string(s);
    out.push_back('\n');
  }
  return out;
}

}  // namespace pd
