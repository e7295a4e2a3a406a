#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "efo/explanation_io.hpp"
#include "efo/fhtd.hpp"
#include "efo/mdp.hpp"
#include "efo/taxi.hpp"
#include "run_config.hpp"

namespace efo::cli {

inline constexpr const char* kGenerator = "efo 0.1.0";
inline constexpr const char* kOutputDirVariable = "EFO_OUTPUT_DIR";

/// --out if given, else $EFO_OUTPUT_DIR, else ./efo-out.
std::filesystem::path output_dir(const std::string& flag);

/// A policy artifact together with the environment it was trained on.
struct PolicyArtifact {
  taxi::TaxiConfig env;
  TabularMdp mdp;
  Policy policy;
  nlohmann::json metadata;
};

PolicyArtifact load_policy_artifact(const std::filesystem::path& path);

/// One seed's explainer tables: <dir>/<event>.tpd plus visits.tpd and learner.json.
struct ExplainerSet {
  std::vector<FhgvfTable> tables;
  std::vector<std::uint64_t> visits;
  std::uint64_t steps_done = 0;
  std::uint64_t seed = 0;
  FhtdConfig config;
  nlohmann::json metadata;
};

void save_explainer_set(const std::filesystem::path& dir, const ExplainerSet& set, const nlohmann::json& provenance);
ExplainerSet load_explainer_set(const std::filesystem::path& dir);

/// Seed directories ("seed-<n>") below `root`, ordered by seed; `root` itself if it holds a learner.json.
std::vector<std::filesystem::path> explainer_dirs(const std::filesystem::path& root);

std::map<std::string, double> event_rewards(const std::vector<std::string>& events);

/// Unknown names are configuration errors that list the valid ones.
void check_event_names(const std::vector<std::string>& events);

/// Accepts an action name ("south") or index.
ActionId parse_action_arg(const std::string& text);

/// Masked-action error listing the valid actions of `s`.
void require_valid(const TabularMdp& mdp, StateId s, ActionId a);

ActionNamer taxi_action_namer();

}  // namespace efo::cli
