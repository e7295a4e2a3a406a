#include "efo/control.hpp"

#include <algorithm>
#include <cmath>

#include "efo/error.hpp"

namespace efo {

double EpsilonSchedule::operator()(std::uint64_t step) const noexcept {
  if (static_cast<double>(step) >= decay_steps) return final;
  return start + static_cast<double>(step) / decay_steps * (final - start);
}

void QLearningConfig::validate() const {
  if (total_steps == 0) throw Error(ErrorKind::Configuration, "total_steps must be positive");
  if (!(discount > 0.0 && discount <= 1.0)) throw Error(ErrorKind::Configuration, "discount must lie in (0, 1]");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw Error(ErrorKind::Configuration, "learning_rate must lie in (0, 1]");
  }
  if (!(epsilon.start >= 0.0 && epsilon.start <= 1.0 && epsilon.final >= 0.0 && epsilon.final <= epsilon.start)) {
    throw Error(ErrorKind::Configuration, "epsilon schedule must decay within [0, 1]");
  }
  if (epsilon.decay_steps < 0.0) throw Error(ErrorKind::Configuration, "epsilon decay_steps must be nonnegative");
}

ActionId greedy_action(const QTable& q, const TabularMdp& mdp, StateId s) {
  const auto valid = mdp.valid_actions(s);
  if (valid.empty()) throw Error(ErrorKind::TerminalState, "no valid action in state " + std::to_string(s));
  // valid_actions is sorted, so strict > keeps the lowest index on ties.
  ActionId best = valid.front();
  double best_value = q(s, best);
  for (ActionId a : valid.subspan(1)) {
    if (q(s, a) > best_value) {
      best = a;
      best_value = q(s, a);
    }
  }
  return best;
}

void q_update(QTable& q, const TabularMdp& mdp, const Transition& tr, double learning_rate, double discount) {
  double target = tr.reward;
  if (!tr.done) target += discount * q(tr.next, greedy_action(q, mdp, tr.next));
  double& value = q(tr.state, tr.action);
  value += learning_rate * (target - value);
}

QLearningResult train_q_learning(const TabularMdp& mdp, const QLearningConfig& config, Rng rng) {
  config.validate();
  QLearningResult result{QTable(mdp.num_states(), mdp.num_actions()), {}};
  QTable& q = result.q;

  StateId s = mdp.sample_initial_state(rng);
  std::size_t episode_steps = 0;
  double episodic_return = 0.0;
  for (std::uint64_t step = 0; step < config.total_steps; ++step) {
    const auto valid = mdp.valid_actions(s);
    ActionId a;
    if (rng.uniform() < config.epsilon(step)) {
      a = valid[rng.below(valid.size())];
    } else {
      a = greedy_action(q, mdp, s);
    }
    const Transition tr = mdp.sample_transition(s, a, rng);
    q_update(q, mdp, tr, config.learning_rate, config.discount);
    episodic_return += tr.reward;
    ++episode_steps;
    if (tr.done || episode_steps >= mdp.max_episode_steps()) {
      result.curve.push_back({step + 1, episodic_return});
      s = mdp.sample_initial_state(rng);
      episode_steps = 0;
      episodic_return = 0.0;
    } else {
      s = tr.next;
    }
  }
  return result;
}

Policy greedy_policy(const QTable& q, const TabularMdp& mdp) {
  if (q.num_states() != mdp.num_states() || q.num_actions() != mdp.num_actions()) {
    throw Error(ErrorKind::Shape, "Q-table shape does not match the MDP");
  }
  Policy policy(mdp.num_states(), mdp.num_actions());
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    if (mdp.is_terminal(s)) continue;
    policy.set(s, greedy_action(q, mdp, s), 1.0);
  }
  return policy;
}

}  // namespace efo
