#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "efo/mdp.hpp"
#include "efo/rng.hpp"

namespace efo {

/// Dense action-value table, zero-initialised.
class QTable {
 public:
  QTable() = default;
  QTable(std::size_t num_states, std::size_t num_actions)
      : num_states_(num_states), num_actions_(num_actions), values_(num_states * num_actions, 0.0) {}

  std::size_t num_states() const noexcept { return num_states_; }
  std::size_t num_actions() const noexcept { return num_actions_; }

  double operator()(StateId s, ActionId a) const { return values_[static_cast<std::size_t>(s) * num_actions_ + a]; }
  double& operator()(StateId s, ActionId a) { return values_[static_cast<std::size_t>(s) * num_actions_ + a]; }
  std::span<const double> row(StateId s) const {
    return {values_.data() + static_cast<std::size_t>(s) * num_actions_, num_actions_};
  }
  const std::vector<double>& data() const noexcept { return values_; }
  std::vector<double>& data() noexcept { return values_; }

 private:
  std::size_t num_states_ = 0;
  std::size_t num_actions_ = 0;
  std::vector<double> values_;
};

/// Linear decay from `start` to `final` over `decay_steps`, then flat.
struct EpsilonSchedule {
  double start = 1.0;
  double final = 0.05;
  double decay_steps = 2.5e5;

  double operator()(std::uint64_t step) const noexcept;
};

struct QLearningConfig {
  std::uint64_t total_steps = 500'000;
  double discount = 0.99;
  double learning_rate = 0.1;
  EpsilonSchedule epsilon;

  void validate() const;
};

struct ReturnSample {
  std::uint64_t step;
  double episodic_return;
};

struct QLearningResult {
  QTable q;
  /// One entry per finished (terminated or truncated) episode, keyed by the global step.
  std::vector<ReturnSample> curve;
};

/// Argmax over valid actions, lowest index on ties.
ActionId greedy_action(const QTable& q, const TabularMdp& mdp, StateId s);

/// One Q-learning backup; the target is r alone when `done`.
void q_update(QTable& q, const TabularMdp& mdp, const Transition& tr, double learning_rate, double discount);

/// Tabular Q-learning with epsilon-greedy exploration restricted to valid actions.
/// Episodes start from the MDP's initial distribution and truncate (with
/// bootstrapping) after max_episode_steps.
QLearningResult train_q_learning(const TabularMdp& mdp, const QLearningConfig& config, Rng rng);

/// Deterministic greedy policy; terminal rows stay empty.
Policy greedy_policy(const QTable& q, const TabularMdp& mdp);

}  // namespace efo
