#include "efo/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "efo/error.hpp"

namespace efo {

namespace {

constexpr double kProbabilityTolerance = 1e-12;

std::string sa_label(StateId s, ActionId a) {
  return "(s=" + std::to_string(s) + ", a=" + std::to_string(a) + ")";
}

}  // namespace

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::MaskedAction: return "masked-action error";
    case ErrorKind::TerminalState: return "terminal-state error";
    case ErrorKind::Distribution: return "distribution error";
    case ErrorKind::Configuration: return "configuration error";
    case ErrorKind::Encoding: return "encoding error";
    case ErrorKind::Classification: return "classification error";
    case ErrorKind::DegenerateDiscount: return "degenerate-discount error";
    case ErrorKind::Shape: return "shape error";
    case ErrorKind::Taxonomy: return "taxonomy error";
    case ErrorKind::Capability: return "capability error";
    case ErrorKind::Divergence: return "divergence error";
    case ErrorKind::ArtifactFormat: return "artifact-format error";
    case ErrorKind::Io: return "i/o error";
  }
  return "error";
}

TabularMdp::TabularMdp(MdpDefinition def)
    : num_states_(def.num_states),
      num_actions_(def.num_actions),
      discount_(def.discount),
      max_episode_steps_(def.max_episode_steps),
      outcomes_(std::move(def.outcomes)),
      reward_fn_(std::move(def.reward)) {
  if (num_states_ == 0 || num_actions_ == 0) {
    throw Error(ErrorKind::Configuration, "MDP needs at least one state and one action");
  }
  if (!(discount_ > 0.0 && discount_ <= 1.0)) {
    throw Error(ErrorKind::Configuration, "discount must lie in (0, 1]");
  }
  const std::size_t pairs = num_states_ * num_actions_;
  if (def.terminal.size() != num_states_ || def.valid.size() != pairs ||
      def.successors.size() != pairs || def.initial.size() != num_states_) {
    throw Error(ErrorKind::Shape, "MDP definition arrays do not match num_states x num_actions");
  }
  if (!reward_fn_) {
    throw Error(ErrorKind::Configuration, "MDP definition has no reward function");
  }
  for (const auto& o : outcomes_) {
    if (!o.evaluate) throw Error(ErrorKind::Configuration, "outcome '" + o.name + "' has no evaluator");
    if (!(o.bound >= 0.0) || !std::isfinite(o.bound)) {
      throw Error(ErrorKind::Configuration, "outcome '" + o.name + "' needs a finite bound");
    }
    if (o.kind == OutcomeKind::EventIndicator && !o.associated_reward) {
      throw Error(ErrorKind::Configuration, "event outcome '" + o.name + "' has no associated reward");
    }
  }

  terminal_.resize(num_states_);
  valid_.assign(pairs, 0);
  valid_offsets_.reserve(num_states_ + 1);
  rows_.resize(pairs);
  const std::size_t k = outcomes_.size();

  auto push_entry = [&](StateId next, double p, double cumulative, double r) {
    SuccessorEntry e{next, p, cumulative, r, static_cast<std::uint32_t>(entries_.size())};
    entries_.push_back(e);
    outcome_values_.resize(outcome_values_.size() + k, 0.0);
    return e.index;
  };

  for (StateId s = 0; s < num_states_; ++s) {
    terminal_[s] = def.terminal[s] ? 1 : 0;
    valid_offsets_.push_back(static_cast<std::uint32_t>(valid_list_.size()));
    if (terminal_[s]) {
      // One absorbing self-loop shared by every action.
      const auto begin = static_cast<std::uint32_t>(entries_.size());
      push_entry(s, 1.0, 1.0, 0.0);
      for (ActionId a = 0; a < num_actions_; ++a) rows_[s * num_actions_ + a] = {begin, 1};
      continue;
    }
    for (ActionId a = 0; a < num_actions_; ++a) {
      const std::size_t i = s * num_actions_ + a;
      if (!def.valid[i]) continue;
      valid_[i] = 1;
      valid_list_.push_back(a);
      const auto& succ = def.successors[i];
      const auto begin = static_cast<std::uint32_t>(entries_.size());
      double total = 0.0;
      for (const auto& [next, p] : succ) {
        if (next >= num_states_) throw Error(ErrorKind::Configuration, "successor out of range at " + sa_label(s, a));
        if (!(p >= 0.0) || !std::isfinite(p)) {
          throw Error(ErrorKind::Distribution, "negative or non-finite probability at " + sa_label(s, a));
        }
        if (p == 0.0) continue;
        for (std::uint32_t j = begin; j < entries_.size(); ++j) {
          if (entries_[j].next == next) {
            throw Error(ErrorKind::Configuration, "duplicate successor at " + sa_label(s, a));
          }
        }
        const double r = reward_fn_(s, a, next);
        if (!std::isfinite(r)) throw Error(ErrorKind::Configuration, "non-finite reward at " + sa_label(s, a));
        total += p;
        const auto idx = push_entry(next, p, total, r);
        for (std::size_t o = 0; o < k; ++o) {
          const double v = outcomes_[o].evaluate(s, a, next);
          if (outcomes_[o].kind == OutcomeKind::EventIndicator && v != 0.0 && v != 1.0) {
            throw Error(ErrorKind::Configuration, "event outcome '" + outcomes_[o].name + "' is not an indicator");
          }
          if (!std::isfinite(v) || std::abs(v) > outcomes_[o].bound) {
            throw Error(ErrorKind::Configuration, "outcome '" + outcomes_[o].name + "' exceeds its bound");
          }
          outcome_values_[static_cast<std::size_t>(idx) * k + o] = v;
        }
      }
      if (std::abs(total - 1.0) > kProbabilityTolerance) {
        throw Error(ErrorKind::Distribution, "transition probabilities at " + sa_label(s, a) + " sum to " +
                                                 std::to_string(total));
      }
      rows_[i] = {begin, static_cast<std::uint32_t>(entries_.size() - begin)};
    }
    if (valid_offsets_.back() == valid_list_.size()) {
      throw Error(ErrorKind::Configuration, "nonterminal state " + std::to_string(s) + " has no valid action");
    }
  }
  valid_offsets_.push_back(static_cast<std::uint32_t>(valid_list_.size()));

  initial_ = std::move(def.initial);
  initial_cumulative_.resize(num_states_);
  double total = 0.0;
  for (StateId s = 0; s < num_states_; ++s) {
    const double p = initial_[s];
    if (!(p >= 0.0)) throw Error(ErrorKind::Distribution, "negative initial probability");
    if (p > 0.0 && terminal_[s]) throw Error(ErrorKind::Distribution, "initial distribution covers a terminal state");
    total += p;
    initial_cumulative_[s] = total;
  }
  if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorKind::Distribution, "initial distribution does not sum to 1");
  if (max_episode_steps_ == 0) throw Error(ErrorKind::Configuration, "max_episode_steps must be positive");
}

void TabularMdp::check_state(StateId s) const {
  if (s >= num_states_) throw Error(ErrorKind::Configuration, "state " + std::to_string(s) + " out of range");
}

bool TabularMdp::is_valid(StateId s, ActionId a) const {
  check_state(s);
  return a < num_actions_ && valid_[static_cast<std::size_t>(s) * num_actions_ + a] != 0;
}

std::span<const ActionId> TabularMdp::valid_actions(StateId s) const {
  check_state(s);
  return {valid_list_.data() + valid_offsets_[s], valid_offsets_[s + 1] - valid_offsets_[s]};
}

std::size_t TabularMdp::outcome_index(std::string_view name) const {
  for (std::size_t i = 0; i < outcomes_.size(); ++i) {
    if (outcomes_[i].name == name) return i;
  }
  throw Error(ErrorKind::Configuration, "outcome '" + std::string(name) + "' is not registered on the MDP");
}

StateId TabularMdp::sample_initial_state(Rng& rng) const {
  const double u = rng.uniform() * initial_cumulative_.back();
  const auto it = std::upper_bound(initial_cumulative_.begin(), initial_cumulative_.end(), u);
  return static_cast<StateId>(std::min<std::ptrdiff_t>(it - initial_cumulative_.begin(), num_states_ - 1));
}

std::vector<Successor> TabularMdp::enumerate_transitions(StateId s, ActionId a) const {
  check_state(s);
  if (!terminal_[s] && !is_valid(s, a)) {
    throw Error(ErrorKind::MaskedAction, "action " + std::to_string(a) + " is masked in state " + std::to_string(s));
  }
  if (a >= num_actions_) throw Error(ErrorKind::MaskedAction, "action out of range");
  std::vector<Successor> out;
  for (const auto& e : successors(s, a)) out.push_back({e.next, e.probability, e.reward, outcome_row(e.index)});
  return out;
}

Transition TabularMdp::sample_transition(StateId s, ActionId a, Rng& rng) const {
  check_state(s);
  if (terminal_[s]) throw Error(ErrorKind::TerminalState, "cannot act in terminal state " + std::to_string(s));
  if (!is_valid(s, a)) {
    throw Error(ErrorKind::MaskedAction, "action " + std::to_string(a) + " is masked in state " + std::to_string(s));
  }
  const auto row = successors(s, a);
  const double u = rng.uniform() * row.back().cumulative;
  const SuccessorEntry* chosen = &row.back();
  for (const auto& e : row) {
    if (u < e.cumulative) {
      chosen = &e;
      break;
    }
  }
  return {s, a, chosen->next, chosen->reward, outcome_row(chosen->index), terminal_[chosen->next] != 0};
}

Policy::Policy(std::size_t num_states, std::size_t num_actions)
    : num_states_(num_states), num_actions_(num_actions), probs_(num_states * num_actions, 0.0) {}

Policy Policy::deterministic(const TabularMdp& mdp, std::span<const ActionId> actions) {
  if (actions.size() != mdp.num_states()) throw Error(ErrorKind::Shape, "one action per state expected");
  Policy p(mdp.num_states(), mdp.num_actions());
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    if (mdp.is_terminal(s)) continue;
    if (!mdp.is_valid(s, actions[s])) {
      throw Error(ErrorKind::MaskedAction, "deterministic policy picks a masked action in state " + std::to_string(s));
    }
    p.set(s, actions[s], 1.0);
  }
  return p;
}

Policy Policy::uniform(const TabularMdp& mdp) {
  Policy p(mdp.num_states(), mdp.num_actions());
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    if (mdp.is_terminal(s)) continue;
    const auto valid = mdp.valid_actions(s);
    for (ActionId a : valid) p.set(s, a, 1.0 / static_cast<double>(valid.size()));
  }
  return p;
}

ActionId Policy::mode(StateId s) const {
  const auto r = row(s);
  return static_cast<ActionId>(std::max_element(r.begin(), r.end()) - r.begin());
}

void validate_policy(const TabularMdp& mdp, const Policy& policy) {
  if (policy.num_states() != mdp.num_states() || policy.num_actions() != mdp.num_actions()) {
    throw Error(ErrorKind::Shape, "policy shape does not match the MDP");
  }
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    if (mdp.is_terminal(s)) continue;
    double total = 0.0;
    for (ActionId a = 0; a < mdp.num_actions(); ++a) {
      const double p = policy.prob(s, a);
      if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::Distribution, "probability outside [0,1] in state " + std::to_string(s));
      if (p != 0.0 && !mdp.is_valid(s, a)) {
        throw Error(ErrorKind::MaskedAction, "policy puts mass on masked action " + std::to_string(a) +
                                                 " in state " + std::to_string(s));
      }
      total += p;
    }
    if (std::abs(total - 1.0) > kProbabilityTolerance) {
      throw Error(ErrorKind::Distribution, "policy row of state " + std::to_string(s) + " sums to " + std::to_string(total));
    }
  }
}

ActionId policy_sample(const Policy& policy, StateId s, Rng& rng) {
  if (s >= policy.num_states()) throw Error(ErrorKind::Configuration, "state out of range");
  const auto r = policy.row(s);
  double total = 0.0;
  for (double p : r) {
    if (!(p >= 0.0)) throw Error(ErrorKind::Distribution, "negative probability in state " + std::to_string(s));
    total += p;
  }
  if (std::abs(total - 1.0) > kProbabilityTolerance) {
    throw Error(ErrorKind::Distribution, "policy row of state " + std::to_string(s) + " sums to " + std::to_string(total));
  }
  const double u = rng.uniform() * total;
  double cumulative = 0.0;
  ActionId last = 0;
  for (ActionId a = 0; a < r.size(); ++a) {
    if (r[a] == 0.0) continue;
    cumulative += r[a];
    last = a;
    if (u < cumulative) return a;
  }
  return last;
}

std::uint64_t policy_hash(const Policy& policy) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double p : policy.data()) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &p, sizeof p);
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

}  // namespace efo
