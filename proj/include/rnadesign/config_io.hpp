#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "rnadesign/bench.hpp"
#include "rnadesign/policy.hpp"
#include "rnadesign/trainer.hpp"
#include "rnadesign/tuner.hpp"

namespace rnadesign {

// JSON round-trips for the user-facing configs. Parsers accept partial
// objects; absent keys keep the defaults.

nlohmann::json policy_config_to_json(const PolicyConfig& cfg);
PolicyConfig policy_config_from_json(const nlohmann::json& j);

nlohmann::json train_loop_to_json(const TrainLoopConfig& cfg);
TrainLoopConfig train_loop_from_json(const nlohmann::json& j);

nlohmann::json search_space_to_json(const SearchSpace& space);
SearchSpace search_space_from_json(const nlohmann::json& j);

nlohmann::json dataset_config_to_json(const DatasetConfig& cfg);
DatasetConfig dataset_config_from_json(const nlohmann::json& j);

// Top-level config file: {"policy": {...}, "loop": {...}, "search_space":
// {...}, "dataset": {...}} — every section optional.
struct FileConfig {
    PolicyConfig policy;
    TrainLoopConfig loop;
    SearchSpace space = SearchSpace::default_space();
    DatasetConfig dataset;
};

FileConfig load_config_file(const std::filesystem::path& path);

// Targets files hold one dot-bracket structure per line; blank lines and
// lines starting with '#' are skipped.
std::vector<DotBracket> load_targets(const std::filesystem::path& path);
void save_targets(const std::filesystem::path& path, std::span<const DotBracket> targets);

}  // namespace rnadesign
