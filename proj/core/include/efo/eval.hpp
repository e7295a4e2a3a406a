#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "efo/fhtd.hpp"
#include "efo/mdp.hpp"
#include "efo/rng.hpp"

namespace efo {

/// Sorted, deduplicated nonterminal states visited by `policy` over `num_episodes`
/// episodes from the MDP's start distribution.
std::vector<StateId> collect_eval_states(const TabularMdp& mdp, const Policy& policy, std::size_t num_episodes, Rng rng);

/// Errors of one outcome, pooled over (state, action, h).
/// "pi" covers actions with pi(a|s) > 0; "pibar" every other valid action.
struct OutcomeErrors {
  std::string outcome;
  double pi_mse = 0.0;
  double pibar_mse = 0.0;
  double pi_inf = 0.0;
  double pibar_inf = 0.0;
  std::size_t pi_count = 0;
  std::size_t pibar_count = 0;
};

/// EFO errors between learned and exact tables, matched by outcome name.
std::vector<OutcomeErrors> compute_errors(std::span<const FhgvfTable> learned, std::span<const FhgvfTable> oracle,
                                          std::span<const StateId> states, const Policy& policy, const TabularMdp& mdp);

struct RunErrors {
  std::uint64_t seed = 0;
  std::size_t num_states = 0;
  std::vector<OutcomeErrors> outcomes;
};

struct MeanStd {
  double mean = 0.0;
  /// Sample standard deviation; absent with fewer than two runs.
  std::optional<double> stddev;
};

MeanStd mean_std(std::span<const double> xs);

struct OutcomeSummary {
  std::string outcome;
  MeanStd pi_mse;
  MeanStd pibar_mse;
  MeanStd pi_inf;
  MeanStd pibar_inf;
};

struct ReferenceErrors {
  double pi_mse;
  double pibar_mse;
  double pi_inf;
  double pibar_inf;
};

/// Published tabular results for the six taxi events (means over 10 runs), printed next to ours.
std::optional<ReferenceErrors> reference_errors(const std::string& outcome);

struct EvalReport {
  std::vector<RunErrors> runs;
  std::vector<OutcomeSummary> summary;
  std::size_t episodes = 0;
  std::uint64_t training_steps = 0;
  std::size_t horizon = 0;
  std::string pooling = "pooled over (state, action, h)";
};

EvalReport aggregate(std::vector<RunErrors> runs, std::size_t episodes, std::uint64_t training_steps,
                     std::size_t horizon);

nlohmann::json report_to_json(const EvalReport& report);
/// One row per (run, outcome) plus mean and std rows.
std::string report_to_csv(const EvalReport& report);
/// Fixed-width text table: Outcome | pi-MSE | pibar-MSE | pi-inf | pibar-inf.
std::string render_report(const EvalReport& report);

}  // namespace efo
