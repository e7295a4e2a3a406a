#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "efo/control.hpp"
#include "efo/fhtd.hpp"
#include "efo/taxi.hpp"

namespace efo::cli {

/// Everything a command needs besides its artifacts: environment, learner
/// hyperparameters, seeds and evaluation budget. Every field has a default.
struct RunConfig {
  taxi::TaxiConfig env = taxi::TaxiConfig::defaults();
  QLearningConfig q_learning;
  FhtdConfig explainer;
  std::vector<std::string> events = taxi::default_event_names();
  std::uint64_t policy_seed = 0;
  std::vector<std::uint64_t> explainer_seeds = {0};
  std::size_t eval_episodes = 10'000;
  std::size_t eval_runs = 10;
};

/// Strict: unknown keys are configuration errors.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);

/// Defaults when `path` is empty; a missing or unreadable file is a configuration error.
RunConfig load_config(const std::filesystem::path& path);

nlohmann::json fhtd_to_json(const FhtdConfig& c);
FhtdConfig fhtd_from_json(const nlohmann::json& j);

}  // namespace efo::cli
