#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "efo/mdp.hpp"
#include "efo/rng.hpp"

namespace efo::testing {

inline OutcomeSpec enter_state(std::string name, StateId target) {
  OutcomeSpec o;
  o.name = std::move(name);
  o.kind = OutcomeKind::EventIndicator;
  o.associated_reward = 1.0;
  o.evaluate = [target](StateId, ActionId, StateId next) { return next == target ? 1.0 : 0.0; };
  return o;
}

/// A -> B deterministically under the single action; B is absorbing.
inline TabularMdp two_state_chain() {
  MdpDefinition d;
  d.num_states = 2;
  d.num_actions = 1;
  d.terminal = {false, true};
  d.valid = {true, false};
  d.successors.resize(2);
  d.successors[0] = {{1, 1.0}};
  d.reward = [](StateId, ActionId, StateId) { return 0.0; };
  d.outcomes.push_back(enter_state("enter_b", 1));
  d.initial = {1.0, 0.0};
  return TabularMdp(std::move(d));
}

struct RandomModel {
  TabularMdp mdp;
  Policy target;
};

/// Dense random 3-state, 2-action MDP with no terminal states, transition rows
/// drawn from a flat Dirichlet, and a random stochastic target policy. The
/// registered outcome "enter0" indicates entering state 0.
inline RandomModel random_model(std::uint64_t seed) {
  Rng rng = RunSeed{seed}.stream(StreamPurpose::Testing, 0);
  MdpDefinition d;
  d.num_states = 3;
  d.num_actions = 2;
  d.terminal.assign(3, false);
  d.valid.assign(6, true);
  d.successors.resize(6);
  for (auto& row : d.successors) {
    double w[3];
    double total = 0.0;
    for (double& x : w) {
      x = -std::log(1.0 - rng.uniform());
      total += x;
    }
    for (StateId j = 0; j < 3; ++j) row.push_back({j, w[j] / total});
  }
  d.reward = [](StateId, ActionId, StateId next) { return next == 0 ? 1.0 : 0.0; };
  d.outcomes.push_back(enter_state("enter0", 0));
  d.initial = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  d.max_episode_steps = 1000;
  TabularMdp mdp(std::move(d));
  Policy pi(3, 2);
  for (StateId s = 0; s < 3; ++s) {
    const double p = rng.uniform();
    pi.set(s, 0, p);
    pi.set(s, 1, 1.0 - p);
  }
  return {std::move(mdp), std::move(pi)};
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace efo::testing
