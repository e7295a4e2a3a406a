#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "efo/rng.hpp"

namespace efo {

using StateId = std::uint32_t;
using ActionId = std::uint32_t;

/// Function of a single transition (s, a, s').
using TransitionFunction = std::function<double(StateId, ActionId, StateId)>;

enum class OutcomeKind { RewardComponent, EventIndicator };

/// A bounded outcome function o(s, a, s'). Event indicators return exactly 0 or 1
/// and carry the reward r_k attached to their event class.
struct OutcomeSpec {
  std::string name;
  OutcomeKind kind = OutcomeKind::EventIndicator;
  TransitionFunction evaluate;
  std::optional<double> associated_reward;
  /// Upper bound on |o|.
  double bound = 1.0;
};

struct SuccessorSpec {
  StateId next;
  double probability;
};

/// Raw description consumed by the TabularMdp constructor. Successor lists are
/// indexed by s * num_actions + a and are only read for valid actions of
/// nonterminal states.
struct MdpDefinition {
  std::size_t num_states = 0;
  std::size_t num_actions = 0;
  double discount = 1.0;
  std::vector<bool> terminal;
  std::vector<bool> valid;
  std::vector<std::vector<SuccessorSpec>> successors;
  TransitionFunction reward;
  std::vector<OutcomeSpec> outcomes;
  std::vector<double> initial;
  std::size_t max_episode_steps = 200;
};

/// One support point of p(.|s, a). `index` addresses the precomputed outcome row.
struct SuccessorEntry {
  StateId next;
  double probability;
  double cumulative;
  double reward;
  std::uint32_t index;
};

struct Successor {
  StateId next;
  double probability;
  double reward;
  std::span<const double> outcomes;
};

/// A sampled step. `outcomes` views storage owned by the MDP and lives as long as it.
struct Transition {
  StateId state;
  ActionId action;
  StateId next;
  double reward;
  std::span<const double> outcomes;
  bool done;
};

/// Immutable enumerable MDP. Terminal states are absorbing: every action
/// self-loops with reward 0 and all outcomes 0.
class TabularMdp {
 public:
  explicit TabularMdp(MdpDefinition definition);

  std::size_t num_states() const noexcept { return num_states_; }
  std::size_t num_actions() const noexcept { return num_actions_; }
  double discount() const noexcept { return discount_; }
  std::size_t max_episode_steps() const noexcept { return max_episode_steps_; }

  bool is_terminal(StateId s) const { return terminal_.at(s) != 0; }
  bool is_valid(StateId s, ActionId a) const;
  std::span<const ActionId> valid_actions(StateId s) const;

  const std::vector<OutcomeSpec>& outcomes() const noexcept { return outcomes_; }
  std::size_t num_outcomes() const noexcept { return outcomes_.size(); }
  /// Throws a configuration error when no outcome of that name is registered.
  std::size_t outcome_index(std::string_view name) const;

  std::span<const double> initial_distribution() const noexcept { return initial_; }
  StateId sample_initial_state(Rng& rng) const;

  /// Support of p(.|s, a). Unchecked fast path for learners and the oracle.
  std::span<const SuccessorEntry> successors(StateId s, ActionId a) const noexcept {
    const auto& r = rows_[static_cast<std::size_t>(s) * num_actions_ + a];
    return {entries_.data() + r.begin, r.count};
  }
  std::span<const double> outcome_row(std::uint32_t entry) const noexcept {
    return {outcome_values_.data() + static_cast<std::size_t>(entry) * outcomes_.size(), outcomes_.size()};
  }

  std::vector<Successor> enumerate_transitions(StateId s, ActionId a) const;
  Transition sample_transition(StateId s, ActionId a, Rng& rng) const;

  /// Evaluates the reward function directly; used to validate transitions.
  double reward(StateId s, ActionId a, StateId next) const { return reward_fn_(s, a, next); }

 private:
  struct Row {
    std::uint32_t begin = 0;
    std::uint32_t count = 0;
  };

  void check_state(StateId s) const;

  std::size_t num_states_;
  std::size_t num_actions_;
  double discount_;
  std::size_t max_episode_steps_;
  std::vector<std::uint8_t> terminal_;
  std::vector<std::uint8_t> valid_;
  std::vector<ActionId> valid_list_;
  std::vector<std::uint32_t> valid_offsets_;
  std::vector<Row> rows_;
  std::vector<SuccessorEntry> entries_;
  std::vector<double> outcome_values_;
  std::vector<OutcomeSpec> outcomes_;
  std::vector<double> initial_;
  std::vector<double> initial_cumulative_;
  TransitionFunction reward_fn_;
};

/// Dense stochastic policy pi(a|s). Rows of terminal states are ignored.
class Policy {
 public:
  Policy() = default;
  Policy(std::size_t num_states, std::size_t num_actions);

  static Policy deterministic(const TabularMdp& mdp, std::span<const ActionId> actions);
  static Policy uniform(const TabularMdp& mdp);

  std::size_t num_states() const noexcept { return num_states_; }
  std::size_t num_actions() const noexcept { return num_actions_; }

  double prob(StateId s, ActionId a) const { return probs_[index(s, a)]; }
  void set(StateId s, ActionId a, double p) { probs_[index(s, a)] = p; }
  std::span<const double> row(StateId s) const {
    return {probs_.data() + static_cast<std::size_t>(s) * num_actions_, num_actions_};
  }
  const std::vector<double>& data() const noexcept { return probs_; }
  std::vector<double>& data() noexcept { return probs_; }

  /// The most probable action (lowest index on ties).
  ActionId mode(StateId s) const;

 private:
  std::size_t index(StateId s, ActionId a) const {
    return static_cast<std::size_t>(s) * num_actions_ + a;
  }

  std::size_t num_states_ = 0;
  std::size_t num_actions_ = 0;
  std::vector<double> probs_;
};

/// Checks every nonterminal row: a distribution within 1e-12 with zero mass on
/// masked actions.
void validate_policy(const TabularMdp& mdp, const Policy& policy);

/// Draws a ~ pi(.|s). Throws a distribution error if the row does not sum to 1.
ActionId policy_sample(const Policy& policy, StateId s, Rng& rng);

/// FNV-1a over the raw probability bytes; identifies a policy in artifact metadata.
std::uint64_t policy_hash(const Policy& policy);

}  // namespace efo
