#include "efo/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "efo/error.hpp"

namespace efo {

namespace {

constexpr std::size_t kMaxDenseEntries = std::size_t{1} << 31;

// V(s) = sum_a pi(a|s) Q(s, a), zero on terminal states.
void state_values(const TabularMdp& mdp, const Policy& policy, std::span<const double> q, std::vector<double>& v) {
  const std::size_t na = mdp.num_actions();
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    double value = 0.0;
    if (!mdp.is_terminal(s)) {
      for (ActionId a : mdp.valid_actions(s)) {
        const double p = policy.prob(s, a);
        if (p != 0.0) value += p * q[s * na + a];
      }
    }
    v[s] = value;
  }
}

}  // namespace

FhgvfTable exact_fhgvf(const TabularMdp& mdp, const Policy& policy, std::string_view outcome, std::size_t horizon,
                       double discount) {
  validate_policy(mdp, policy);
  const std::size_t k = mdp.outcome_index(outcome);
  if (horizon * mdp.num_states() * mdp.num_actions() > kMaxDenseEntries) {
    throw Error(ErrorKind::Capability, "model too large for dense dynamic programming");
  }
  FhgvfTable table(std::string(outcome), horizon, mdp.num_states(), mdp.num_actions(), discount);
  const std::size_t na = mdp.num_actions();
  const std::size_t level_size = mdp.num_states() * na;
  std::vector<double> next_value(mdp.num_states(), 0.0);
  for (std::size_t h = 0; h < horizon; ++h) {
    if (h > 0) {
      state_values(mdp, policy, std::span<const double>(table.data().data() + (h - 1) * level_size, level_size),
                   next_value);
    }
    for (StateId s = 0; s < mdp.num_states(); ++s) {
      if (mdp.is_terminal(s)) continue;
      for (ActionId a : mdp.valid_actions(s)) {
        double q = 0.0;
        for (const auto& e : mdp.successors(s, a)) {
          q += e.probability * (mdp.outcome_row(e.index)[k] + discount * next_value[e.next]);
        }
        table(h, s, a) = q;
      }
    }
  }
  return table;
}

EfoMatrix exact_efo(const TabularMdp& mdp, const Policy& policy, std::string_view outcome, std::size_t horizon,
                    double discount, StateId s, ActionId a) {
  if (!mdp.is_terminal(s) && !mdp.is_valid(s, a)) {
    throw Error(ErrorKind::MaskedAction, "action " + std::to_string(a) + " is masked in state " + std::to_string(s));
  }
  const auto table = exact_fhgvf(mdp, policy, outcome, horizon, discount);
  return decompose_fhgvf(table.series(s, a), discount, std::string(outcome), Provenance::Oracle);
}

ValueIterationResult value_iteration(const TabularMdp& mdp, double discount, double tolerance,
                                     std::size_t max_iterations) {
  if (!(discount > 0.0 && discount <= 1.0)) throw Error(ErrorKind::Configuration, "discount must lie in (0, 1]");
  ValueIterationResult out{QTable(mdp.num_states(), mdp.num_actions()), {}, 0.0, 0};
  std::vector<double> v(mdp.num_states(), 0.0);
  QTable& q = out.q;
  for (std::size_t it = 1; it <= max_iterations; ++it) {
    double residual = 0.0;
    for (StateId s = 0; s < mdp.num_states(); ++s) {
      if (mdp.is_terminal(s)) continue;
      for (ActionId a : mdp.valid_actions(s)) {
        double value = 0.0;
        for (const auto& e : mdp.successors(s, a)) value += e.probability * (e.reward + discount * v[e.next]);
        residual = std::max(residual, std::abs(value - q(s, a)));
        q(s, a) = value;
      }
    }
    for (StateId s = 0; s < mdp.num_states(); ++s) {
      if (!mdp.is_terminal(s)) v[s] = q(s, greedy_action(q, mdp, s));
    }
    out.residual = residual;
    out.iterations = it;
    if (!std::isfinite(residual)) break;
    if (residual < tolerance) {
      out.policy = greedy_policy(q, mdp);
      return out;
    }
  }
  throw Error(ErrorKind::Divergence, "value iteration did not converge (residual " + std::to_string(out.residual) + ")");
}

QTable evaluate_policy(const TabularMdp& mdp, const Policy& policy, double discount, double tolerance,
                       std::size_t max_iterations) {
  validate_policy(mdp, policy);
  QTable q(mdp.num_states(), mdp.num_actions());
  std::vector<double> v(mdp.num_states(), 0.0);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    state_values(mdp, policy, q.data(), v);
    double residual = 0.0;
    for (StateId s = 0; s < mdp.num_states(); ++s) {
      if (mdp.is_terminal(s)) continue;
      for (ActionId a : mdp.valid_actions(s)) {
        double value = 0.0;
        for (const auto& e : mdp.successors(s, a)) value += e.probability * (e.reward + discount * v[e.next]);
        residual = std::max(residual, std::abs(value - q(s, a)));
        q(s, a) = value;
      }
    }
    if (residual < tolerance) return q;
    if (!std::isfinite(residual)) break;
  }
  throw Error(ErrorKind::Divergence, "policy evaluation did not converge");
}

double start_expectation(const TabularMdp& mdp, const Policy& policy, const FhgvfTable& table, std::size_t h) {
  if (h >= table.horizon()) throw Error(ErrorKind::Shape, "horizon index out of range");
  double total = 0.0;
  const auto initial = mdp.initial_distribution();
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    if (initial[s] == 0.0) continue;
    for (ActionId a : mdp.valid_actions(s)) total += initial[s] * policy.prob(s, a) * table(h, s, a);
  }
  return total;
}

double success_probability(const TabularMdp& mdp, const Policy& policy, std::string_view success_event,
                           std::size_t horizon) {
  const auto table = exact_fhgvf(mdp, policy, success_event, horizon, 1.0);
  return start_expectation(mdp, policy, table, horizon - 1);
}

}  // namespace efo
