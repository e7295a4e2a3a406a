#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "efo/mdp.hpp"
#include "efo/rng.hpp"

namespace efo {

/// Fixed-horizon generalized value function estimates for one outcome.
///
/// Level h holds Q_{o,h}(s,a) = E[sum_{t=0}^{h} gamma_o^t o_t], i.e. h + 1
/// outcome terms, for h = 0..H-1. The implicit level -1 is identically zero.
/// (Some derivations index the same quantities 1..H with Q_0 = 0; level h here
/// corresponds to their level h + 1.)
class FhgvfTable {
 public:
  FhgvfTable() = default;
  FhgvfTable(std::string outcome_name, std::size_t horizon, std::size_t num_states, std::size_t num_actions,
             double discount);

  const std::string& outcome_name() const noexcept { return outcome_name_; }
  std::size_t horizon() const noexcept { return horizon_; }
  std::size_t num_states() const noexcept { return num_states_; }
  std::size_t num_actions() const noexcept { return num_actions_; }
  double discount() const noexcept { return discount_; }

  double operator()(std::size_t h, StateId s, ActionId a) const { return values_[index(h, s, a)]; }
  double& operator()(std::size_t h, StateId s, ActionId a) { return values_[index(h, s, a)]; }

  /// [Q_{o,0}(s,a), ..., Q_{o,H-1}(s,a)]
  std::vector<double> series(StateId s, ActionId a) const;

  /// Row-major (h, s, a).
  const std::vector<double>& data() const noexcept { return values_; }
  std::vector<double>& data() noexcept { return values_; }

  std::size_t index(std::size_t h, StateId s, ActionId a) const noexcept {
    return (h * num_states_ + s) * num_actions_ + a;
  }

 private:
  std::string outcome_name_;
  std::size_t horizon_ = 0;
  std::size_t num_states_ = 0;
  std::size_t num_actions_ = 0;
  double discount_ = 1.0;
  std::vector<double> values_;
};

/// Step sizes. Polynomial: alpha_n = 1 / (1 + n)^rho with n the number of
/// earlier visits of (s, a); rho in (0.5, 1] meets the Robbins-Monro conditions.
struct LearningRateSchedule {
  enum class Kind { Constant, Polynomial };
  Kind kind = Kind::Constant;
  double constant = 0.1;
  double exponent = 0.7;

  static LearningRateSchedule make_constant(double alpha) { return {Kind::Constant, alpha, 0.7}; }
  static LearningRateSchedule make_polynomial(double rho) { return {Kind::Polynomial, 0.1, rho}; }

  double operator()(std::uint64_t visits) const noexcept;
  void validate() const;
};

/// Mixes the target policy with uniform exploration over valid actions.
class BehaviorPolicy {
 public:
  BehaviorPolicy(const TabularMdp& mdp, const Policy& base, double exploration_rate);

  ActionId sample(StateId s, Rng& rng) const;
  double prob(StateId s, ActionId a) const;
  double exploration_rate() const noexcept { return epsilon_; }

 private:
  const TabularMdp* mdp_;
  const Policy* base_;
  double epsilon_;
};

struct FhtdConfig {
  std::size_t horizon = 30;
  std::uint64_t total_steps = 5'000'000;
  double discount = 1.0;
  LearningRateSchedule learning_rate;
  double exploration_rate = 0.2;
  /// Bootstrap with sum_a' pi(a'|s') Q(s', a') instead of one sampled a'.
  bool expected_backup = false;
  /// Train all outcomes from one behaviour stream; false gives each outcome its own stream.
  bool shared_trajectories = true;

  void validate() const;
};

/// Single-transition FHTD backup, all levels at once:
///   Q_h(s,a) += alpha * (o + gamma_o * Q_{h-1}(s', a') - Q_h(s,a)),  Q_{-1} = 0,
/// with no bootstrap when the transition is terminal. Levels are swept from
/// H-1 down so every target reads pre-update values.
void fhtd_update(FhgvfTable& table, const Transition& tr, double outcome, ActionId next_action, double alpha);

/// Same backup with the expectation over pi(.|s') in place of a sampled a'.
void fhtd_update_expected(FhgvfTable& table, const Transition& tr, double outcome, const Policy& target,
                          double alpha);

/// Trains one table per registered outcome off-policy from behaviour-policy episodes.
class FhtdLearner {
 public:
  using Progress = std::function<void(std::uint64_t step, std::span<const FhgvfTable> tables)>;

  FhtdLearner(const TabularMdp& mdp, const Policy& target, std::vector<std::string> outcomes, FhtdConfig config);

  /// Continues from previously learned tables and visit counts.
  FhtdLearner(const TabularMdp& mdp, const Policy& target, std::vector<FhgvfTable> tables,
              std::vector<std::uint64_t> visits, std::uint64_t steps_done, FhtdConfig config);

  /// Runs `steps` transitions. When the config asks for separate trajectories,
  /// each outcome consumes its own stream derived from `seed`.
  void train(std::uint64_t steps, const RunSeed& seed, const Progress& progress = {},
             std::uint64_t progress_interval = 0);

  /// Feeds one transition (with its bootstrap action) to the tables in `which`.
  void observe(const Transition& tr, ActionId next_action, std::span<const std::size_t> which);

  const std::vector<FhgvfTable>& tables() const noexcept { return tables_; }
  std::vector<FhgvfTable>& tables() noexcept { return tables_; }
  /// Per-(s, a) visit counts; one array per outcome table.
  const std::vector<std::vector<std::uint64_t>>& visits() const noexcept { return visits_; }
  std::uint64_t steps_done() const noexcept { return steps_done_; }
  const FhtdConfig& config() const noexcept { return config_; }

 private:
  void run_stream(std::uint64_t steps, Rng rng, std::span<const std::size_t> which, const Progress& progress,
                  std::uint64_t progress_interval);

  const TabularMdp* mdp_;
  const Policy* target_;
  FhtdConfig config_;
  std::vector<std::size_t> outcome_ids_;
  std::vector<FhgvfTable> tables_;
  std::vector<std::vector<std::uint64_t>> visits_;
  std::uint64_t steps_done_ = 0;
};

/// Convenience wrapper: one outcome, one behaviour stream.
FhgvfTable train_explainer(const TabularMdp& mdp, const Policy& target, const std::string& outcome,
                           const FhtdConfig& config, const RunSeed& seed);

}  // namespace efo
