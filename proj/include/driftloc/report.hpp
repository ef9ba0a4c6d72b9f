#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "driftloc/gcm.hpp"
#include "driftloc/hmm.hpp"
#include "driftloc/sim.hpp"

namespace driftloc {

using json = nlohmann::json;

/// Groups with cell lists, labels, domicile keys and sizes.
json decomposition_to_json(const FlowDecomposition& d, const Workspace& w);

json decoded_to_json(const DecodedPath& decoded, std::span<const Direction> obs);

/// Config <-> JSON. Parsing collects every problem into one ConfigError.
json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

json experiment_to_json(const ExperimentResult& result, const FlowModel& model);

inline constexpr const char* kExperimentCsvHeader =
    "condition,label,region,mode,steps,runs,"
    "final_mean,final_median,final_std,final_min,final_max,"
    "trajectory_mean,trajectory_median,trajectory_std,trajectory_min,trajectory_max";

/// One row per condition, fixed six-decimal formatting.
std::string experiment_to_csv(const ExperimentResult& result);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace driftloc
